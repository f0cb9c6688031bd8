#include "siegel/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siegel/errors.hpp"

namespace siegel {

namespace {

struct ExpandResult {
  ContinuedFraction cf;
  bool exhausted = false;  // ran out of certified bits before `depth`
};

// Gauss-map expansion with error tracking. The absolute error of the running
// remainder grows by 1/x^2 per step; an entry is certified only while the
// computed fractional part is farther from {0, 1} than the accumulated error.
ExpandResult expand_impl(const BigFloat& x, int depth) {
  mpfr_prec_t prec = x.prec();
  ExpandResult res;
  BigFloat one(1.0, prec);
  BigFloat cur = x;
  double err_log2 = -static_cast<double>(prec);
  for (int k = 1; k <= depth; ++k) {
    if (cur.is_zero()) {
      res.cf.terminated = true;
      return res;
    }
    double ey_log2 = err_log2 - 2.0 * cur.log2_abs();
    if (ey_log2 > -3.0) {
      res.exhausted = true;
      return res;
    }
    BigFloat y(prec);
    mpfr_ui_div(y.raw(), 1, cur.raw(), MPFR_RNDN);
    BigFloat fl = y.floor();
    if (!mpfr_fits_ulong_p(fl.raw(), MPFR_RNDN)) {
      res.exhausted = true;
      return res;
    }
    std::uint64_t a = mpfr_get_ui(fl.raw(), MPFR_RNDN);
    BigFloat frac = y - fl;
    if (frac.is_zero() || frac.log2_abs() <= ey_log2 + 1.0) {
      // indistinguishable from an exact integer: rational at this precision
      res.cf.entries.push_back(a);
      res.cf.terminated = true;
      return res;
    }
    if ((one - frac).log2_abs() <= ey_log2 + 1.0) {
      // could round to a or a+1: the entry itself is uncertifiable
      res.exhausted = true;
      return res;
    }
    res.cf.entries.push_back(a);
    cur = frac;
    err_log2 = ey_log2;
  }
  return res;
}

void require_angle_range(const BigFloat& x) {
  if (x.sign() <= 0 || !(x < BigFloat(1.0, 8))) {
    throw UsageError("rotation number must lie strictly in (0,1)");
  }
}

// ln of an exact integer, stable for values beyond double range.
double ln_mpz(const mpz_class& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return (std::log2(m) + static_cast<double>(e)) * std::log(2.0);
}

// Value of [0; prefix..., T, T, T, ...]: with omega = [T; T, T, ...] =
// (T + sqrt(T^2+4))/2, the value is (p_m omega + p_{m-1})/(q_m omega + q_{m-1}).
BigFloat constant_tail_value(const std::vector<std::uint64_t>& prefix,
                             std::uint64_t tail, mpfr_prec_t prec) {
  mpfr_prec_t wp = prec + 64;
  BigFloat omega(wp);
  mpz_class disc = mpz_class(static_cast<unsigned long>(tail));
  disc = disc * disc + 4;
  mpfr_set_z(omega.raw(), disc.get_mpz_t(), MPFR_RNDN);
  mpfr_sqrt(omega.raw(), omega.raw(), MPFR_RNDN);
  mpfr_add_ui(omega.raw(), omega.raw(), static_cast<unsigned long>(tail), MPFR_RNDN);
  mpfr_div_ui(omega.raw(), omega.raw(), 2, MPFR_RNDN);

  mpz_class pm1 = 1, qm1 = 0, p = 0, q = 1;
  for (std::uint64_t a : prefix) {
    mpz_class pn = mpz_class(static_cast<unsigned long>(a)) * p + pm1;
    mpz_class qn = mpz_class(static_cast<unsigned long>(a)) * q + qm1;
    pm1 = p;
    qm1 = q;
    p = pn;
    q = qn;
  }
  BigFloat num(wp), den(wp), t(wp);
  mpfr_set_z(t.raw(), p.get_mpz_t(), MPFR_RNDN);
  mpfr_mul(num.raw(), t.raw(), omega.raw(), MPFR_RNDN);
  mpfr_set_z(t.raw(), pm1.get_mpz_t(), MPFR_RNDN);
  mpfr_add(num.raw(), num.raw(), t.raw(), MPFR_RNDN);
  mpfr_set_z(t.raw(), q.get_mpz_t(), MPFR_RNDN);
  mpfr_mul(den.raw(), t.raw(), omega.raw(), MPFR_RNDN);
  mpfr_set_z(t.raw(), qm1.get_mpz_t(), MPFR_RNDN);
  mpfr_add(den.raw(), den.raw(), t.raw(), MPFR_RNDN);

  BigFloat out(prec);
  mpfr_div(out.raw(), num.raw(), den.raw(), MPFR_RNDN);
  return out;
}

}  // namespace

ContinuedFraction cf_expand(const BigFloat& x, int depth) {
  require_angle_range(x);
  if (depth < 1) throw UsageError("cf_expand depth must be >= 1");
  ExpandResult res = expand_impl(x, depth);
  if (res.exhausted) {
    throw PrecisionExhausted(
        "continued-fraction entry " + std::to_string(res.cf.entries.size() + 1) +
        " is not certifiable at " + std::to_string(x.prec()) + " bits");
  }
  return res.cf;
}

std::vector<Convergent> convergents(const ContinuedFraction& cf) {
  std::vector<Convergent> out;
  out.push_back({mpz_class(0), mpz_class(1)});
  mpz_class pm1 = 1, qm1 = 0;
  for (std::uint64_t a : cf.entries) {
    if (a < 1) throw UsageError("continued-fraction entries must be >= 1");
    const Convergent& last = out.back();
    mpz_class p = mpz_class(static_cast<unsigned long>(a)) * last.p + pm1;
    mpz_class q = mpz_class(static_cast<unsigned long>(a)) * last.q + qm1;
    pm1 = last.p;
    qm1 = last.q;
    out.push_back({p, q});
  }
  return out;
}

double bruno_sum(const ContinuedFraction& cf, int terms) {
  if (terms < 1) throw UsageError("bruno_sum needs at least one term");
  if (static_cast<int>(cf.entries.size()) < terms + 1) {
    throw InsufficientDepth("bruno_sum with " + std::to_string(terms) +
                            " terms needs " + std::to_string(terms + 1) +
                            " cf entries, have " +
                            std::to_string(cf.entries.size()));
  }
  std::vector<Convergent> conv = convergents(cf);
  double s = 0.0;
  for (int n = 1; n <= terms; ++n) {
    double qn = mpz_get_d(conv[n].q.get_mpz_t());
    s += ln_mpz(conv[n + 1].q) / qn;  // term underflows to 0 once q_n overflows
  }
  return s;
}

RotationNumber RotationNumber::golden(mpfr_prec_t prec) {
  return from_cf_tail({}, 1, prec);
}

RotationNumber RotationNumber::from_cf_tail(std::vector<std::uint64_t> prefix,
                                            std::uint64_t tail,
                                            mpfr_prec_t prec) {
  if (tail < 1) throw UsageError("constant tail entry must be >= 1");
  for (std::uint64_t a : prefix) {
    if (a < 1) throw UsageError("continued-fraction entries must be >= 1");
  }
  BigFloat v = constant_tail_value(prefix, tail, prec);
  ContinuedFraction cf;
  cf.entries = std::move(prefix);
  RotationNumber r(std::move(v), std::move(cf));
  r.constant_tail_ = tail;
  std::uint64_t tb = tail;
  for (std::uint64_t a : r.cf_.entries) tb = std::max(tb, a);
  r.type_bound_ = tb;
  return r;
}

RotationNumber RotationNumber::from_value(BigFloat value) {
  require_angle_range(value);
  ExpandResult res = expand_impl(value, 64);
  return RotationNumber(std::move(value), std::move(res.cf));
}

RotationNumber RotationNumber::from_rational(unsigned long p, unsigned long q,
                                             mpfr_prec_t prec) {
  if (p < 1 || q <= p) throw UsageError("rational angle must satisfy 1 <= p < q");
  BigFloat v(prec);
  mpfr_set_ui(v.raw(), p, MPFR_RNDN);
  mpfr_div_ui(v.raw(), v.raw(), q, MPFR_RNDN);
  ContinuedFraction cf;
  cf.terminated = true;
  // exact Euclid on q/p
  unsigned long num = q, den = p;
  while (den != 0) {
    cf.entries.push_back(num / den);
    unsigned long rem = num % den;
    num = den;
    den = rem;
  }
  return RotationNumber(std::move(v), std::move(cf));
}

std::vector<std::uint64_t> RotationNumber::materialized_entries(
    std::size_t count) const {
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (k < cf_.entries.size()) {
      out.push_back(cf_.entries[k]);
    } else if (constant_tail_) {
      out.push_back(*constant_tail_);
    } else {
      throw InsufficientDepth("only " + std::to_string(cf_.entries.size()) +
                              " cf entries are certified, need " +
                              std::to_string(count));
    }
  }
  return out;
}

std::vector<Convergent> RotationNumber::convergents_until(
    const mpz_class& q_min) const {
  std::vector<Convergent> out;
  out.push_back({mpz_class(0), mpz_class(1)});
  mpz_class pm1 = 1, qm1 = 0;
  std::size_t k = 0;
  while (out.back().q <= q_min) {
    std::uint64_t a;
    if (k < cf_.entries.size()) {
      a = cf_.entries[k];
    } else if (constant_tail_) {
      a = *constant_tail_;
    } else if (cf_.terminated) {
      throw RationalAngle("rotation number is rational with denominator " +
                          out.back().q.get_str());
    } else {
      throw InsufficientDepth(
          "certified cf entries exhausted before reaching denominator " +
          q_min.get_str());
    }
    const Convergent& last = out.back();
    mpz_class p = mpz_class(static_cast<unsigned long>(a)) * last.p + pm1;
    mpz_class q = mpz_class(static_cast<unsigned long>(a)) * last.q + qm1;
    pm1 = last.p;
    qm1 = last.q;
    out.push_back({p, q});
    ++k;
  }
  return out;
}

double RotationNumber::bruno(int terms) const {
  ContinuedFraction cf;
  cf.entries = materialized_entries(static_cast<std::size_t>(terms) + 1);
  return bruno_sum(cf, terms);
}

std::string RotationNumber::canonical_spec() const {
  if (constant_tail_) {
    // prefix entries equal to the tail constant are part of the tail
    std::size_t n = cf_.entries.size();
    while (n > 0 && cf_.entries[n - 1] == *constant_tail_) --n;
    std::string s = "cf:[";
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) s += ",";
      s += std::to_string(cf_.entries[k]);
    }
    s += "]+tail:" + std::to_string(*constant_tail_);
    return s;
  }
  if (cf_.terminated) {
    std::vector<Convergent> conv = convergents(cf_);
    if (conv.back().p.fits_ulong_p() && conv.back().q.fits_ulong_p()) {
      return conv.back().p.get_str() + "/" + conv.back().q.get_str();
    }
    // deep rationals (e.g. dyadic roundings of decimals) round-trip by value
  }
  return value_.to_hex() + "@" + std::to_string(precision_bits());
}

nlohmann::json RotationNumber::to_json() const {
  nlohmann::json j;
  j["value_hex"] = value_.to_hex();
  j["precision_bits"] = static_cast<std::int64_t>(precision_bits());
  j["cf"] = cf_.entries;
  j["terminated"] = cf_.terminated;
  if (constant_tail_) {
    j["constant_tail"] = *constant_tail_;
  } else {
    j["constant_tail"] = nullptr;
  }
  if (type_bound_) {
    j["type_bound"] = *type_bound_;
  } else {
    j["type_bound"] = nullptr;
  }
  return j;
}

RotationNumber RotationNumber::from_json(const nlohmann::json& j) {
  for (const char* key : {"value_hex", "precision_bits", "cf", "terminated",
                          "constant_tail", "type_bound"}) {
    if (!j.contains(key)) {
      throw UsageError(std::string("rotation json missing field '") + key + "'");
    }
  }
  mpfr_prec_t prec = j.at("precision_bits").get<std::int64_t>();
  if (prec < 24) throw UsageError("precision_bits must be >= 24");
  BigFloat v = BigFloat::from_hex(j.at("value_hex").get<std::string>(), prec);
  require_angle_range(v);
  ContinuedFraction cf;
  cf.entries = j.at("cf").get<std::vector<std::uint64_t>>();
  cf.terminated = j.at("terminated").get<bool>();
  RotationNumber r(std::move(v), std::move(cf));
  if (!j.at("constant_tail").is_null()) {
    r.constant_tail_ = j.at("constant_tail").get<std::uint64_t>();
  }
  if (!j.at("type_bound").is_null()) {
    r.type_bound_ = j.at("type_bound").get<std::uint64_t>();
  }
  if (r.constant_tail_) {
    // the value is a pure function of (prefix, tail, precision); recompute
    BigFloat ref = constant_tail_value(r.cf_.entries, *r.constant_tail_, prec);
    if (mpfr_cmp(ref.raw(), r.value_.raw()) != 0) {
      throw UsageError("rotation json: value disagrees with cf entries");
    }
    return r;
  }
  // consistency: the value must be within 2/q_k^2 of the deepest convergent
  // the precision can confirm (2*log2(q_k) + 8 <= bits)
  if (!r.cf_.entries.empty()) {
    std::vector<Convergent> conv = convergents(r.cf_);
    std::size_t k = 0;
    for (std::size_t i = 1; i < conv.size(); ++i) {
      std::size_t qbits = mpz_sizeinbase(conv[i].q.get_mpz_t(), 2);
      if (2 * qbits + 8 <= static_cast<std::size_t>(prec)) k = i;
    }
    if (k >= 1) {
      const Convergent& last = conv[k];
      BigFloat approx(prec + 32), diff(prec + 32), bound(prec + 32);
      mpfr_set_z(approx.raw(), last.p.get_mpz_t(), MPFR_RNDN);
      BigFloat qf(prec + 32);
      mpfr_set_z(qf.raw(), last.q.get_mpz_t(), MPFR_RNDN);
      mpfr_div(approx.raw(), approx.raw(), qf.raw(), MPFR_RNDN);
      mpfr_sub(diff.raw(), r.value_.raw(), approx.raw(), MPFR_RNDN);
      mpfr_abs(diff.raw(), diff.raw(), MPFR_RNDN);
      mpfr_mul(bound.raw(), qf.raw(), qf.raw(), MPFR_RNDN);
      mpfr_ui_div(bound.raw(), 1, bound.raw(), MPFR_RNDN);
      mpfr_mul_ui(bound.raw(), bound.raw(), 2, MPFR_RNDN);
      if (diff > bound) {
        throw UsageError("rotation json: value disagrees with cf entries");
      }
    }
  }
  return r;
}

RotationNumber bounded_type_approximant(const RotationNumber& theta, int cut,
                                        std::uint64_t tail_entry) {
  if (cut < 1) throw UsageError("approximant cut must be >= 1");
  if (tail_entry < 1) throw UsageError("approximant tail entry must be >= 1");
  std::vector<std::uint64_t> prefix =
      theta.materialized_entries(static_cast<std::size_t>(cut));
  prefix.push_back(tail_entry);
  return RotationNumber::from_cf_tail(std::move(prefix), 1,
                                      theta.precision_bits());
}

double divisor_floor_log2(const RotationNumber& theta, std::uint64_t m_max) {
  if (m_max < 1) throw UsageError("divisor bound needs m_max >= 1");
  std::vector<Convergent> conv =
      theta.convergents_until(mpz_class(static_cast<unsigned long>(m_max)));
  std::size_t K = 0;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    if (conv[i].q <= static_cast<unsigned long>(m_max)) K = i;
  }
  mpz_class s = conv[K + 1].q + conv[K].q;
  long e = 0;
  double m = mpz_get_d_2exp(&e, s.get_mpz_t());
  return 2.0 - (std::log2(m) + static_cast<double>(e));
}

RotationNumber parse_theta_spec(const std::string& spec,
                                mpfr_prec_t default_prec) {
  std::string s = spec;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  if (s.empty()) throw UsageError("empty rotation-number spec");

  if (s == "golden") return RotationNumber::golden(default_prec);
  if (s == "silver") return RotationNumber::from_cf_tail({}, 2, default_prec);

  if (s.rfind("cf:", 0) == 0) {
    std::string rest = s.substr(3);
    std::uint64_t tail = 0;
    std::size_t plus = rest.find("+tail:");
    if (plus != std::string::npos) {
      std::string tailstr = rest.substr(plus + 6);
      try {
        tail = std::stoull(tailstr);
      } catch (const std::exception&) {
        throw UsageError("bad tail entry in '" + spec + "'");
      }
      rest = rest.substr(0, plus);
    }
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
      throw UsageError("cf spec needs a bracketed entry list: '" + spec + "'");
    }
    std::vector<std::uint64_t> entries;
    std::string body = rest.substr(1, rest.size() - 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string tok = body.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      tok.erase(0, tok.find_first_not_of(" \t"));
      tok.erase(tok.find_last_not_of(" \t") + 1);
      if (tok.empty()) throw UsageError("empty cf entry in '" + spec + "'");
      try {
        entries.push_back(std::stoull(tok));
      } catch (const std::exception&) {
        throw UsageError("bad cf entry '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (tail > 0) {
      return RotationNumber::from_cf_tail(std::move(entries), tail,
                                          default_prec);
    }
    if (entries.empty()) {
      throw UsageError("finite cf spec needs at least one entry");
    }
    // finite expansion: an exact rational
    ContinuedFraction cf;
    cf.entries = entries;
    std::vector<Convergent> conv = convergents(cf);
    if (!conv.back().p.fits_ulong_p() || !conv.back().q.fits_ulong_p()) {
      throw UsageError("rational from cf spec overflows");
    }
    return RotationNumber::from_rational(conv.back().p.get_ui(),
                                         conv.back().q.get_ui(), default_prec);
  }

  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    try {
      unsigned long p = std::stoul(s.substr(0, slash));
      unsigned long q = std::stoul(s.substr(slash + 1));
      return RotationNumber::from_rational(p, q, default_prec);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("bad rational spec '" + spec + "'");
    }
  }

  std::size_t at = s.find('@');
  mpfr_prec_t prec = default_prec;
  std::string dec = s;
  if (at != std::string::npos) {
    try {
      prec = std::stol(s.substr(at + 1));
    } catch (const std::exception&) {
      throw UsageError("bad precision in '" + spec + "'");
    }
    if (prec < 24) throw UsageError("precision must be >= 24 bits");
    dec = s.substr(0, at);
  }
  return RotationNumber::from_value(BigFloat::parse(dec, prec));
}

}  // namespace siegel
