#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "siegel/prec.hpp"

namespace siegel {

// Continued fraction of a number in (0,1): x = [0; a_1, a_2, ...] with all
// entries >= 1. `terminated` means the input was rational at the working
// precision and the expansion is complete.
struct ContinuedFraction {
  std::vector<std::uint64_t> entries;
  bool terminated = false;
};

// Exact convergent p/q of a continued fraction. Index 0 is the trivial
// convergent 0/1; index k >= 1 uses entries a_1..a_k.
struct Convergent {
  mpz_class p, q;
};

// Expands x in (0,1) to `depth` entries. Tracks the error amplification of
// the Gauss map and throws PrecisionExhausted once the requested depth
// exceeds what the precision of x certifies. Rational inputs (at working
// precision) yield a shorter, terminated expansion.
ContinuedFraction cf_expand(const BigFloat& x, int depth);

// Convergents p_0/q_0 = 0/1 through p_d/q_d via the standard recurrence
// p_k = a_k p_{k-1} + p_{k-2}, q_k = a_k q_{k-1} + q_{k-2}.
std::vector<Convergent> convergents(const ContinuedFraction& cf);

// Partial sum  sum_{n=1}^{terms} log(q_{n+1}) / q_n  (natural log).
// Requires at least terms+1 entries; throws InsufficientDepth otherwise.
double bruno_sum(const ContinuedFraction& cf, int terms);

// A rotation number theta in (0,1) carried at explicit precision together
// with as much continued-fraction structure as is certifiable. Numbers built
// from a constant-tail description know their entire expansion; numbers built
// from a decimal only know the prefix their precision certifies.
class RotationNumber {
 public:
  // Golden mean (sqrt(5)-1)/2 = [0; 1, 1, 1, ...].
  static RotationNumber golden(mpfr_prec_t prec);

  // [0; prefix..., tail, tail, tail, ...] with an infinite constant tail.
  // An empty prefix with tail=1 is the golden mean; tail=2 is sqrt(2)-1.
  static RotationNumber from_cf_tail(std::vector<std::uint64_t> prefix,
                                     std::uint64_t tail, mpfr_prec_t prec);

  // From a numeric value; the cf prefix is expanded as deep as the precision
  // certifies. Throws UsageError unless 0 < value < 1.
  static RotationNumber from_value(BigFloat value);

  // Exact rational p/q in (0,1). Representable for bookkeeping; operations
  // that need an irrational angle reject it.
  static RotationNumber from_rational(unsigned long p, unsigned long q,
                                      mpfr_prec_t prec);

  const BigFloat& value() const { return value_; }
  mpfr_prec_t precision_bits() const { return value_.prec(); }
  bool is_rational() const { return cf_.terminated; }
  const ContinuedFraction& cf() const { return cf_; }
  std::optional<std::uint64_t> constant_tail() const { return constant_tail_; }
  std::optional<std::uint64_t> type_bound() const { return type_bound_; }

  // First `count` entries; follows the constant tail when present. Throws
  // InsufficientDepth if that many entries are not certifiable.
  std::vector<std::uint64_t> materialized_entries(std::size_t count) const;

  // Convergents with q up to at least `q_min` (plus one extra), following the
  // tail when present. Throws InsufficientDepth when unreachable.
  std::vector<Convergent> convergents_until(const mpz_class& q_min) const;

  // Partial Bruno sum over this number's expansion.
  double bruno(int terms) const;

  // A theta-spec string that parses back to this number: constant-tail form
  // when the tail is known, p/q for rationals with machine-word numerator and
  // denominator, hex@bits otherwise.
  std::string canonical_spec() const;

  nlohmann::json to_json() const;
  static RotationNumber from_json(const nlohmann::json& j);

 private:
  RotationNumber(BigFloat value, ContinuedFraction cf)
      : value_(std::move(value)), cf_(std::move(cf)) {}

  BigFloat value_;
  ContinuedFraction cf_;
  std::optional<std::uint64_t> constant_tail_;
  std::optional<std::uint64_t> type_bound_;
};

// Bounded-type approximant: keep the first `cut` entries of theta, insert one
// entry `tail_entry`, then continue with all ones. Large tail_entry values
// park the number close to the rational convergent p_cut/q_cut while keeping
// it bounded type.
RotationNumber bounded_type_approximant(const RotationNumber& theta, int cut,
                                        std::uint64_t tail_entry);

// log2 of a certified lower bound for min_{1 <= m <= m_max} |lambda^m - 1|
// where lambda = e^{2 pi i theta}: the minimum is 2 sin(pi dist(m theta, Z)),
// and dist(m theta, Z) >= 1/(q_{K+1} + q_K) for the deepest convergent with
// q_K <= m_max. Used to plan working precision before running a recurrence.
double divisor_floor_log2(const RotationNumber& theta, std::uint64_t m_max);

// Parses a rotation-number description:
//   golden | silver | <decimal> | <decimal>@<bits> | p/q |
//   cf:[a1,a2,...]            (finite, i.e. rational) |
//   cf:[a1,a2,...]+tail:T     (infinite constant tail T)
RotationNumber parse_theta_spec(const std::string& spec,
                                mpfr_prec_t default_prec);

}  // namespace siegel
