#pragma once

#include <complex>
#include <string>
#include <vector>

#include "siegel/curve.hpp"
#include "siegel/prec.hpp"
#include "siegel/rotation.hpp"

namespace siegel {

// Power series phi(z) = sum_{n>=1} b_n z^n, b_1 = 1, conjugating the
// quadratic map z -> lambda z + z^2 to the rigid rotation z -> lambda z:
// substituting phi into  phi(lambda z) = lambda phi(z) + phi(z)^2  and
// matching coefficients of z^n gives the recurrence
//
//   b_n (lambda^n - lambda) = sum_{j=1}^{n-1} b_j b_{n-j},   b_1 = 1.
//
// With phi'(0) = 1 the radius of convergence of the series equals the
// conformal radius of the stable rotation domain, so coefficient growth is
// the object of study. The divisors lambda^n - lambda = lambda
// (lambda^{n-1} - 1) become small whenever (n-1) theta is nearly integral,
// which is what drives the precision planning below.
struct LinearizationSeries {
  RotationNumber theta;
  mpfr_prec_t precision_bits = 0;
  BigComplex lambda;
  std::vector<BigComplex> coeffs;  // coeffs[n-1] = b_n
  double min_divisor = 0.0;        // min_n |lambda^n - lambda| encountered
  double radius_estimate = 0.0;    // filled by the slope fit (see below)
  // error-model bound: every coefficient's relative error is below
  // 2^(worst_rel_error_log2)
  double worst_rel_error_log2 = 0.0;

  int order() const { return static_cast<int>(coeffs.size()); }
  const BigComplex& b(int n) const { return coeffs[static_cast<std::size_t>(n) - 1]; }
};

struct LinearizeOptions {
  // 0 = plan from convergents: ceil(log2 1/divisor_floor) + 64, floor 256.
  // An explicit value is honored as-is; the runtime error model throws
  // PrecisionExhausted if it proves insufficient.
  mpfr_prec_t precision_bits = 0;
  // Coefficients must keep at least this many trustworthy bits.
  double trust_floor_bits = 32.0;
};

// Runs the recurrence to order N. Alongside the exact-precision arithmetic it
// carries a first-order error model (per-coefficient relative error, growing
// through products, cancellation in the convolution, and divisor loss) and
// fails loudly instead of returning digits it cannot back. Throws
// RationalAngle for terminated expansions.
LinearizationSeries linearize(const RotationNumber& theta, int N,
                              const LinearizeOptions& opts = {});

struct RadiusFit {
  double radius = 0.0;
  double slope = 0.0;         // d ln|b_n| / dn
  double fit_residual = 0.0;  // rms of the linear fit
  std::size_t points = 0;
};

// Least-squares slope of ln|b_n| over n in [lo, hi]; radius = exp(-slope).
// Needs a window of at least 50 coefficients.
RadiusFit estimate_radius(const LinearizationSeries& s, int lo, int hi);

// Truncation tail bound |b_N| r^N / (1 - r/radius_estimate); infinity when
// r >= radius_estimate.
double tail_bound(const LinearizationSeries& s, double r);

struct ResidualReport {
  double max_residual = 0.0;  // max_k |phi(lambda z_k) - lambda phi(z_k) - phi(z_k)^2|
  double tail_bound = 0.0;
};

// Functional-equation residual of the truncated series at M points on the
// circle |z| = r, evaluated in full working precision.
ResidualReport residual(const LinearizationSeries& s, double r, int M);

// Samples phi on |z| = r as a SampledCurve of M points: coefficients are
// rescaled to c_n = b_n r^n in working precision (so the double conversion
// never overflows), then evaluated by Horner at unit points e^{2 pi i k/M}.
// Throws TailTooLarge when tail_bound(r) > tail_tol.
SampledCurve sample_curve(const LinearizationSeries& s, double r, int M,
                          double tail_tol = 1e-8);

// Distance from the curve's samples to the critical point -lambda/2 of
// z -> lambda z + z^2.
double critical_point_distance(const SampledCurve& c,
                               std::complex<double> lambda);

// Exact checkpoint (hex-float JSON); load reproduces the series bit for bit.
void save_series(const LinearizationSeries& s, const std::string& path);
LinearizationSeries load_series(const std::string& path);

}  // namespace siegel
