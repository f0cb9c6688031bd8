#include "siegel/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>
#include "siegel/errors.hpp"
#include "siegel/kernels.hpp"

namespace siegel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logadd2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

double log2_mag(mpfr_srcptr v) {
  if (mpfr_zero_p(v)) return kNegInf;
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v, MPFR_RNDN);
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const nlohmann::json& j, const char* key) {
  std::string s = j.at(key).get<std::string>();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw UsageError(std::string("bad float for '") + key + "': " + s);
  }
  return v;
}

// theta's value at precision P. Constant-tail numbers are recomputed from
// their exact description; plain values are zero-padded (exact either way).
BigFloat theta_value_at(const RotationNumber& theta, mpfr_prec_t P) {
  if (theta.constant_tail()) {
    return RotationNumber::from_cf_tail(theta.cf().entries,
                                        *theta.constant_tail(), P)
        .value();
  }
  BigFloat v(P);
  mpfr_set(v.raw(), theta.value().raw(), MPFR_RNDN);
  return v;
}

// phi(z) by Horner at a full-precision point; temps owned by the caller.
void phi_eval(const LinearizationSeries& s, mpfr_srcptr zr, mpfr_srcptr zi,
              mpfr_ptr outr, mpfr_ptr outi, mpfr_ptr ar, mpfr_ptr ai,
              mpfr_ptr tr, mpfr_ptr ti) {
  const int N = s.order();
  mpfr_set(ar, s.b(N).re.raw(), MPFR_RNDN);
  mpfr_set(ai, s.b(N).im.raw(), MPFR_RNDN);
  for (int n = N - 1; n >= 1; --n) {
    mpfr_fmms(tr, ar, zr, ai, zi, MPFR_RNDN);
    mpfr_fmma(ti, ar, zi, ai, zr, MPFR_RNDN);
    mpfr_add(ar, tr, s.b(n).re.raw(), MPFR_RNDN);
    mpfr_add(ai, ti, s.b(n).im.raw(), MPFR_RNDN);
  }
  mpfr_fmms(outr, ar, zr, ai, zi, MPFR_RNDN);
  mpfr_fmma(outi, ar, zi, ai, zr, MPFR_RNDN);
}

}  // namespace

namespace {

LinearizationSeries linearize_at(const RotationNumber& theta, int N,
                                 mpfr_prec_t P, double trust_floor) {
  LinearizationSeries s{theta,
                        P,
                        unit_exponential(theta_value_at(theta, P)),
                        {},
                        0.0,
                        0.0,
                        kNegInf};
  s.coeffs.reserve(static_cast<std::size_t>(N));
  s.coeffs.emplace_back(1.0, 0.0, P);

  // error-model state, all in log2: L[n] = magnitude of b_n, err[n] = bound
  // on its relative error
  std::vector<double> L(static_cast<std::size_t>(N) + 1, kNegInf);
  std::vector<double> err(static_cast<std::size_t>(N) + 1, kNegInf);
  L[1] = 0.0;
  err[1] = -static_cast<double>(P);
  double worst = err[1];
  double min_div = std::numeric_limits<double>::infinity();

  BigComplex lampow = s.lambda * s.lambda;  // lambda^n, starting at n = 2
  mpfr_t sr, si, tr, ti, dr, di, dn2, t;
  mpfr_inits2(P, sr, si, tr, ti, dr, di, dn2, t, static_cast<mpfr_ptr>(nullptr));

  for (int n = 2; n <= N; ++n) {
    // S_n = sum_{j=1}^{n-1} b_j b_{n-j}, folded symmetrically
    mpfr_set_zero(sr, 1);
    mpfr_set_zero(si, 1);
    double aabs = kNegInf;  // log2 sum of |b_j||b_{n-j}| over the full range
    double perr = kNegInf;  // log2 sum of |b_j||b_{n-j}| (delta_j + delta_k)
    const int half = (n - 1) / 2;
    for (int j = 1; j <= half; ++j) {
      const BigComplex& bj = s.coeffs[static_cast<std::size_t>(j) - 1];
      const BigComplex& bk = s.coeffs[static_cast<std::size_t>(n - j) - 1];
      mpfr_fmms(tr, bj.re.raw(), bk.re.raw(), bj.im.raw(), bk.im.raw(),
                MPFR_RNDN);
      mpfr_fmma(ti, bj.re.raw(), bk.im.raw(), bj.im.raw(), bk.re.raw(),
                MPFR_RNDN);
      mpfr_add(sr, sr, tr, MPFR_RNDN);
      mpfr_add(si, si, ti, MPFR_RNDN);
      const double w = L[j] + L[n - j] + 1.0;  // mirror pair counted once
      aabs = logadd2(aabs, w);
      perr = logadd2(perr, w + logadd2(err[j], err[n - j]));
    }
    mpfr_mul_2ui(sr, sr, 1, MPFR_RNDN);
    mpfr_mul_2ui(si, si, 1, MPFR_RNDN);
    if (n % 2 == 0) {
      const BigComplex& bj = s.coeffs[static_cast<std::size_t>(n / 2) - 1];
      mpfr_fmms(tr, bj.re.raw(), bj.re.raw(), bj.im.raw(), bj.im.raw(),
                MPFR_RNDN);
      mpfr_mul(ti, bj.re.raw(), bj.im.raw(), MPFR_RNDN);
      mpfr_mul_2ui(ti, ti, 1, MPFR_RNDN);
      mpfr_add(sr, sr, tr, MPFR_RNDN);
      mpfr_add(si, si, ti, MPFR_RNDN);
      aabs = logadd2(aabs, 2.0 * L[n / 2]);
      perr = logadd2(perr, 2.0 * L[n / 2] + err[n / 2] + 1.0);
    }
    mpfr_hypot(t, sr, si, MPFR_RNDN);
    const double Ls = log2_mag(t);

    // divisor lambda^n - lambda
    mpfr_sub(dr, lampow.re.raw(), s.lambda.re.raw(), MPFR_RNDN);
    mpfr_sub(di, lampow.im.raw(), s.lambda.im.raw(), MPFR_RNDN);
    mpfr_hypot(t, dr, di, MPFR_RNDN);
    const double Ld = log2_mag(t);
    const double dabs = mpfr_get_d(t, MPFR_RNDN);
    if (mpfr_zero_p(t) || Ld < -static_cast<double>(P) + 8.0) {
      mpfr_clears(sr, si, tr, ti, dr, di, dn2, t,
                  static_cast<mpfr_ptr>(nullptr));
      throw PrecisionExhausted(
          "divisor |lambda^" + std::to_string(n) +
          " - lambda| is indistinguishable from zero at " + std::to_string(P) +
          " bits");
    }
    if (dabs < min_div) min_div = dabs;

    // b_n = S_n / d
    BigComplex bn(P);
    mpfr_fmma(dn2, dr, dr, di, di, MPFR_RNDN);
    mpfr_fmma(tr, sr, dr, si, di, MPFR_RNDN);
    mpfr_fmms(ti, si, dr, sr, di, MPFR_RNDN);
    mpfr_div(bn.re.raw(), tr, dn2, MPFR_RNDN);
    mpfr_div(bn.im.raw(), ti, dn2, MPFR_RNDN);

    mpfr_hypot(t, bn.re.raw(), bn.im.raw(), MPFR_RNDN);
    L[n] = log2_mag(t);
    s.coeffs.push_back(std::move(bn));

    if (Ls == kNegInf) {
      err[n] = -static_cast<double>(P);  // exact zero coefficient
    } else {
      // absolute error of S_n: inherited factor errors weighted by the term
      // magnitudes, plus rounding of ~n additions at P bits
      const double sum_round =
          aabs + std::log2(static_cast<double>(n)) - static_cast<double>(P);
      const double abs_err_s = logadd2(perr, sum_round);
      // relative error: cancellation shows up as abs_err_s - Ls
      const double err_s = abs_err_s - Ls;
      // divisor drift: lambda^n carries ~n ulps; relative to |d|
      const double err_d = std::log2(static_cast<double>(n + 2)) -
                           static_cast<double>(P) - Ld;
      err[n] = logadd2(logadd2(err_s, err_d), -static_cast<double>(P) + 1.0);
    }
    if (-err[n] < trust_floor) {
      mpfr_clears(sr, si, tr, ti, dr, di, dn2, t,
                  static_cast<mpfr_ptr>(nullptr));
      throw PrecisionExhausted(
          "coefficient b_" + std::to_string(n) + " retains only " +
          std::to_string(-err[n]) + " trustworthy bits at " +
          std::to_string(P) + "-bit precision");
    }
    worst = std::max(worst, err[n]);
    lampow = lampow * s.lambda;
  }
  mpfr_clears(sr, si, tr, ti, dr, di, dn2, t, static_cast<mpfr_ptr>(nullptr));

  s.min_divisor = min_div;
  s.worst_rel_error_log2 = worst;
  if (N >= 100) {
    s.radius_estimate = estimate_radius(s, N / 2, N).radius;
  } else {
    // short series: crude N-th root of the last coefficient
    s.radius_estimate = std::exp2(-L[static_cast<std::size_t>(N)] /
                                  static_cast<double>(N));
  }
  if (!(s.radius_estimate > 0.0) || !(s.radius_estimate < 4.0)) {
    throw DegenerateFit("implausible radius estimate " +
                        std::to_string(s.radius_estimate));
  }
  return s;
}

}  // namespace

LinearizationSeries linearize(const RotationNumber& theta, int N,
                              const LinearizeOptions& opts) {
  if (N < 2) throw UsageError("series order must be >= 2");
  if (theta.is_rational()) {
    throw RationalAngle("angle " + theta.canonical_spec() +
                        " has a terminated continued fraction");
  }
  if (opts.precision_bits != 0) {
    if (opts.precision_bits < 24) {
      throw UsageError("working precision must be >= 24 bits");
    }
    return linearize_at(theta, N, opts.precision_bits, opts.trust_floor_bits);
  }
  double floor_log2 =
      divisor_floor_log2(theta, static_cast<std::uint64_t>(N - 1));
  mpfr_prec_t P = std::max<mpfr_prec_t>(
      256, static_cast<mpfr_prec_t>(std::ceil(-floor_log2)) + 64);
  // the divisor-based plan cannot see cancellation accumulated across N
  // steps; when the runtime error model vetoes it, escalate geometrically
  // (deterministically) instead of failing a request that never pinned bits
  for (int attempt = 0;; ++attempt) {
    try {
      return linearize_at(theta, N, P, opts.trust_floor_bits);
    } catch (const PrecisionExhausted&) {
      if (attempt >= 3) throw;
      P *= 2;
    }
  }
}

RadiusFit estimate_radius(const LinearizationSeries& s, int lo, int hi) {
  if (lo < 1 || hi > s.order() || lo >= hi) {
    throw UsageError("radius fit window must satisfy 1 <= lo < hi <= N");
  }
  const int count = hi - lo + 1;
  if (count < 50) {
    throw DegenerateFit("radius fit window has " + std::to_string(count) +
                        " coefficients, needs >= 50");
  }
  constexpr double kLn2 = 0.6931471805599453;
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(count));
  ys.reserve(static_cast<std::size_t>(count));
  int skipped = 0;
  for (int n = lo; n <= hi; ++n) {
    double l2 = s.b(n).log2_abs();
    if (l2 == kNegInf) {
      ++skipped;
      continue;
    }
    xs.push_back(static_cast<double>(n));
    ys.push_back(l2 * kLn2);
  }
  if (skipped * 10 > count) {
    throw DegenerateFit("radius fit window has " + std::to_string(skipped) +
                        " vanishing coefficients out of " +
                        std::to_string(count));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("degenerate abscissae in radius fit");
  RadiusFit fit;
  fit.slope = sxy / sxx;
  fit.points = xs.size();
  double intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double e = ys[k] - (fit.slope * xs[k] + intercept);
    ss += e * e;
  }
  fit.fit_residual = std::sqrt(ss / static_cast<double>(xs.size()));
  fit.radius = std::exp(-fit.slope);
  if (!std::isfinite(fit.radius) || fit.radius <= 0.0) {
    throw DegenerateFit("radius fit produced " + std::to_string(fit.radius));
  }
  return fit;
}

double tail_bound(const LinearizationSeries& s, double r) {
  if (!(r > 0.0)) throw UsageError("tail bound needs r > 0");
  if (!(s.radius_estimate > 0.0) || r >= s.radius_estimate) {
    return std::numeric_limits<double>::infinity();
  }
  const int N = s.order();
  mpfr_t t, rp;
  mpfr_inits2(s.precision_bits, t, rp, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(rp, r, MPFR_RNDN);
  mpfr_pow_ui(rp, rp, static_cast<unsigned long>(N), MPFR_RNDN);
  mpfr_hypot(t, s.b(N).re.raw(), s.b(N).im.raw(), MPFR_RNDN);
  mpfr_mul(t, t, rp, MPFR_RNDN);
  double head = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clears(t, rp, static_cast<mpfr_ptr>(nullptr));
  return head / (1.0 - r / s.radius_estimate);
}

ResidualReport residual(const LinearizationSeries& s, double r, int M) {
  if (!(r > 0.0)) throw UsageError("residual needs r > 0");
  if (M < 1) throw UsageError("residual needs at least one sample");
  const mpfr_prec_t P = s.precision_bits;

  mpfr_t ang, piq, tr, ti, ar, ai;
  mpfr_inits2(P, ang, piq, tr, ti, ar, ai, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(piq, MPFR_RNDN);
  mpfr_mul_ui(piq, piq, 2, MPFR_RNDN);

  BigFloat rr(r, P);
  BigComplex z(P), u(P), phiz(P), phiu(P);
  double worst = 0.0;
  for (int k = 0; k < M; ++k) {
    mpfr_mul_ui(ang, piq, static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_div_ui(ang, ang, static_cast<unsigned long>(M), MPFR_RNDN);
    mpfr_sin_cos(z.im.raw(), z.re.raw(), ang, MPFR_RNDN);
    mpfr_mul(z.re.raw(), z.re.raw(), rr.raw(), MPFR_RNDN);
    mpfr_mul(z.im.raw(), z.im.raw(), rr.raw(), MPFR_RNDN);
    u = s.lambda * z;
    phi_eval(s, z.re.raw(), z.im.raw(), phiz.re.raw(), phiz.im.raw(), ar, ai,
             tr, ti);
    phi_eval(s, u.re.raw(), u.im.raw(), phiu.re.raw(), phiu.im.raw(), ar, ai,
             tr, ti);
    BigComplex defect = phiu - (s.lambda * phiz) - (phiz * phiz);
    double d = defect.abs().to_double();
    if (d > worst) worst = d;
  }
  mpfr_clears(ang, piq, tr, ti, ar, ai, static_cast<mpfr_ptr>(nullptr));

  ResidualReport rep;
  rep.max_residual = worst;
  rep.tail_bound = tail_bound(s, r);
  return rep;
}

SampledCurve sample_curve(const LinearizationSeries& s, double r, int M,
                          double tail_tol) {
  if (M < 16) throw UsageError("curve sampling needs M >= 16");
  if (!(r > 0.0)) throw UsageError("curve sampling needs r > 0");
  double tb = tail_bound(s, r);
  if (!(tb <= tail_tol)) {
    throw TailTooLarge("truncation tail " + std::to_string(tb) + " at r = " +
                       std::to_string(r) + " exceeds tolerance " +
                       std::to_string(tail_tol));
  }
  const int N = s.order();
  std::vector<double> cre(static_cast<std::size_t>(N));
  std::vector<double> cim(static_cast<std::size_t>(N));
  mpfr_t rp, t;
  mpfr_inits2(s.precision_bits, rp, t, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(rp, r, MPFR_RNDN);
  for (int n = 1; n <= N; ++n) {
    if (n > 1) {
      mpfr_mul_d(rp, rp, r, MPFR_RNDN);
    }
    mpfr_mul(t, s.b(n).re.raw(), rp, MPFR_RNDN);
    cre[static_cast<std::size_t>(n) - 1] = mpfr_get_d(t, MPFR_RNDN);
    mpfr_mul(t, s.b(n).im.raw(), rp, MPFR_RNDN);
    cim[static_cast<std::size_t>(n) - 1] = mpfr_get_d(t, MPFR_RNDN);
  }
  mpfr_clears(rp, t, static_cast<mpfr_ptr>(nullptr));

  std::vector<double> wre(static_cast<std::size_t>(M));
  std::vector<double> wim(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(M);
    wre[static_cast<std::size_t>(k)] = std::cos(a);
    wim[static_cast<std::size_t>(k)] = std::sin(a);
  }
  std::vector<double> outre(static_cast<std::size_t>(M));
  std::vector<double> outim(static_cast<std::size_t>(M));
  kernels::active().poly_eval(cre.data(), cim.data(),
                              static_cast<std::size_t>(N), wre.data(),
                              wim.data(), static_cast<std::size_t>(M),
                              outre.data(), outim.data());
  std::vector<std::complex<double>> pts(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    pts[static_cast<std::size_t>(k)] = {outre[static_cast<std::size_t>(k)],
                                        outim[static_cast<std::size_t>(k)]};
  }
  CurveSource src;
  src.theta_spec = s.theta.canonical_spec();
  src.radius = r;
  src.series_length = N;
  src.precision_bits = s.precision_bits;
  return SampledCurve(std::move(pts), std::move(src));
}

double critical_point_distance(const SampledCurve& c,
                               std::complex<double> lambda) {
  double d2 = kernels::active().min_dist2_from_point(
      -0.5 * lambda.real(), -0.5 * lambda.imag(), c.xs(), c.ys(), c.size());
  return std::sqrt(d2);
}

void save_series(const LinearizationSeries& s, const std::string& path) {
  nlohmann::json j;
  j["theta"] = s.theta.to_json();
  j["theta_spec"] = s.theta.canonical_spec();
  j["precision_bits"] = static_cast<std::int64_t>(s.precision_bits);
  j["lambda_hex"] = {s.lambda.re.to_hex(), s.lambda.im.to_hex()};
  nlohmann::json coeffs = nlohmann::json::array();
  for (const BigComplex& b : s.coeffs) {
    coeffs.push_back({b.re.to_hex(), b.im.to_hex()});
  }
  j["coeffs_hex"] = std::move(coeffs);
  j["min_divisor_hex"] = hex_double(s.min_divisor);
  j["radius_estimate_hex"] = hex_double(s.radius_estimate);
  j["worst_rel_error_log2_hex"] = hex_double(s.worst_rel_error_log2);
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw UsageError("write to '" + path + "' failed");
}

LinearizationSeries load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open series file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("series file '" + path + "' is not valid json: " +
                     e.what());
  }
  try {
    RotationNumber theta = RotationNumber::from_json(j.at("theta"));
    mpfr_prec_t P = j.at("precision_bits").get<std::int64_t>();
    if (P < 24) throw UsageError("precision_bits must be >= 24");
    LinearizationSeries s{std::move(theta), P, BigComplex(P), {}, 0.0, 0.0,
                          0.0};
    s.lambda.re =
        BigFloat::from_hex(j.at("lambda_hex").at(0).get<std::string>(), P);
    s.lambda.im =
        BigFloat::from_hex(j.at("lambda_hex").at(1).get<std::string>(), P);
    for (const nlohmann::json& c : j.at("coeffs_hex")) {
      s.coeffs.emplace_back(BigFloat::from_hex(c.at(0).get<std::string>(), P),
                            BigFloat::from_hex(c.at(1).get<std::string>(), P));
    }
    if (s.coeffs.size() < 2) {
      throw UsageError("series file has fewer than two coefficients");
    }
    if (!(s.b(1).re == BigFloat(1.0, P)) || !s.b(1).im.is_zero()) {
      throw UsageError("series file violates the b_1 = 1 normalization");
    }
    s.min_divisor = parse_hex_double(j, "min_divisor_hex");
    s.radius_estimate = parse_hex_double(j, "radius_estimate_hex");
    s.worst_rel_error_log2 = parse_hex_double(j, "worst_rel_error_log2_hex");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("series file '" + path + "' is malformed: " + e.what());
  }
}

}  // namespace siegel
