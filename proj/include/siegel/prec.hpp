#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

namespace siegel {

// Arbitrary-precision real number with an explicit mantissa width in bits.
// Value semantics: copies carry both the value and the precision. Binary
// operators allocate the result at the wider of the two operand precisions;
// everything rounds to nearest.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  BigFloat(double v, mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_d(x_, v, MPFR_RNDN); }
  BigFloat(long v, mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_si(x_, v, MPFR_RNDN); }

  // Parses decimal or (with 0x/-0x prefix) hexadecimal floating point.
  static BigFloat parse(const std::string& s, mpfr_prec_t prec);

  BigFloat(const BigFloat& o) { mpfr_init2(x_, o.prec()); mpfr_set(x_, o.x_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, 2);
    mpfr_swap(x_, o.x_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(x_, o.prec());
      mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(x_, o.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
  mpfr_ptr raw() { return x_; }
  mpfr_srcptr raw() const { return x_; }

  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(x_); }
  int sign() const { return mpfr_sgn(x_); }
  // log2 of magnitude, as a double; -inf for zero.
  double log2_abs() const;

  // Exact hexadecimal representation ("0x1.8p+1" style); parsing it back at
  // the same precision reproduces the value bit for bit.
  std::string to_hex() const;
  static BigFloat from_hex(const std::string& s, mpfr_prec_t prec);

  BigFloat operator+(const BigFloat& o) const { return bin(o, mpfr_add); }
  BigFloat operator-(const BigFloat& o) const { return bin(o, mpfr_sub); }
  BigFloat operator*(const BigFloat& o) const { return bin(o, mpfr_mul); }
  BigFloat operator/(const BigFloat& o) const { return bin(o, mpfr_div); }
  BigFloat operator-() const {
    BigFloat r(prec());
    mpfr_neg(r.x_, x_, MPFR_RNDN);
    return r;
  }

  bool operator==(const BigFloat& o) const { return mpfr_equal_p(x_, o.x_) != 0; }
  bool operator<(const BigFloat& o) const { return mpfr_less_p(x_, o.x_) != 0; }
  bool operator>(const BigFloat& o) const { return mpfr_greater_p(x_, o.x_) != 0; }
  bool operator<=(const BigFloat& o) const { return mpfr_lessequal_p(x_, o.x_) != 0; }
  bool operator>=(const BigFloat& o) const { return mpfr_greaterequal_p(x_, o.x_) != 0; }

  BigFloat abs() const {
    BigFloat r(prec());
    mpfr_abs(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat sqrt() const {
    BigFloat r(prec());
    mpfr_sqrt(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat log() const {
    BigFloat r(prec());
    mpfr_log(r.x_, x_, MPFR_RNDN);
    return r;
  }
  BigFloat floor() const {
    BigFloat r(prec());
    mpfr_floor(r.x_, x_);
    return r;
  }

  static BigFloat pi(mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_const_pi(r.x_, MPFR_RNDN);
    return r;
  }

 private:
  using MpfrBinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  BigFloat bin(const BigFloat& o, MpfrBinOp op) const {
    BigFloat r(prec() > o.prec() ? prec() : o.prec());
    op(r.x_, x_, o.x_, MPFR_RNDN);
    return r;
  }
  mpfr_t x_;
};

// Complex number over BigFloat. Both components share one precision.
struct BigComplex {
  BigFloat re, im;

  explicit BigComplex(mpfr_prec_t prec = 64) : re(prec), im(prec) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  BigComplex(double r, double i, mpfr_prec_t prec) : re(r, prec), im(i, prec) {}

  mpfr_prec_t prec() const { return re.prec(); }

  BigComplex operator+(const BigComplex& o) const { return {re + o.re, im + o.im}; }
  BigComplex operator-(const BigComplex& o) const { return {re - o.re, im - o.im}; }
  BigComplex operator*(const BigComplex& o) const;
  BigComplex operator*(const BigFloat& s) const { return {re * s, im * s}; }
  BigComplex operator/(const BigComplex& o) const;

  BigFloat norm() const;  // |z|^2
  BigFloat abs() const;   // |z|, via hypot
  double log2_abs() const;

  std::pair<std::string, std::string> to_hex() const { return {re.to_hex(), im.to_hex()}; }
};

// e^{2*pi*i*t} at the precision of t.
BigComplex unit_exponential(const BigFloat& t);

}  // namespace siegel
