#include "siegel/prec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "siegel/errors.hpp"

namespace siegel {

BigFloat BigFloat::parse(const std::string& s, mpfr_prec_t prec) {
  BigFloat r(prec);
  // Base 0: decimal unless the string carries a 0x prefix.
  if (s.empty() || mpfr_set_str(r.x_, s.c_str(), 0, MPFR_RNDN) != 0) {
    throw UsageError("cannot parse number: '" + s + "'");
  }
  return r;
}

double BigFloat::log2_abs() const {
  if (mpfr_zero_p(x_)) return -std::numeric_limits<double>::infinity();
  if (!mpfr_number_p(x_)) return std::numeric_limits<double>::quiet_NaN();
  // exp + log2(mantissa in [0.5,1)) keeps this exact enough for error models.
  mpfr_t m;
  mpfr_init2(m, 53);
  mpfr_abs(m, x_, MPFR_RNDN);
  // read the exponent after rounding: a mantissa of all ones carries over
  mpfr_exp_t e = mpfr_get_exp(m);
  mpfr_set_exp(m, 0);
  double frac = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return static_cast<double>(e) + std::log2(frac);
}

std::string BigFloat::to_hex() const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", x_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

BigFloat BigFloat::from_hex(const std::string& s, mpfr_prec_t prec) {
  BigFloat r(prec);
  if (mpfr_set_str(r.x_, s.c_str(), 0, MPFR_RNDN) != 0) {
    throw UsageError("cannot parse hex float: '" + s + "'");
  }
  return r;
}

BigComplex BigComplex::operator*(const BigComplex& o) const {
  mpfr_prec_t p = prec() > o.prec() ? prec() : o.prec();
  BigComplex r(p);
  // (a+bi)(c+di) = (ac - bd) + (ad + bc)i, each via a fused pair.
  mpfr_fmms(r.re.raw(), re.raw(), o.re.raw(), im.raw(), o.im.raw(), MPFR_RNDN);
  mpfr_fmma(r.im.raw(), re.raw(), o.im.raw(), im.raw(), o.re.raw(), MPFR_RNDN);
  return r;
}

BigComplex BigComplex::operator/(const BigComplex& o) const {
  mpfr_prec_t p = prec() > o.prec() ? prec() : o.prec();
  BigFloat d = o.norm();
  BigComplex num(p);
  mpfr_fmma(num.re.raw(), re.raw(), o.re.raw(), im.raw(), o.im.raw(), MPFR_RNDN);
  mpfr_fmms(num.im.raw(), im.raw(), o.re.raw(), re.raw(), o.im.raw(), MPFR_RNDN);
  return {num.re / d, num.im / d};
}

BigFloat BigComplex::norm() const {
  BigFloat r(prec());
  mpfr_fmma(r.raw(), re.raw(), re.raw(), im.raw(), im.raw(), MPFR_RNDN);
  return r;
}

BigFloat BigComplex::abs() const {
  BigFloat r(prec());
  mpfr_hypot(r.raw(), re.raw(), im.raw(), MPFR_RNDN);
  return r;
}

double BigComplex::log2_abs() const {
  BigFloat h(64);
  mpfr_hypot(h.raw(), re.raw(), im.raw(), MPFR_RNDN);
  return h.log2_abs();
}

BigComplex unit_exponential(const BigFloat& t) {
  mpfr_prec_t p = t.prec();
  BigFloat angle(p);
  mpfr_const_pi(angle.raw(), MPFR_RNDN);
  mpfr_mul_ui(angle.raw(), angle.raw(), 2, MPFR_RNDN);
  mpfr_mul(angle.raw(), angle.raw(), t.raw(), MPFR_RNDN);
  BigComplex z(p);
  mpfr_sin_cos(z.im.raw(), z.re.raw(), angle.raw(), MPFR_RNDN);
  return z;
}

}  // namespace siegel
