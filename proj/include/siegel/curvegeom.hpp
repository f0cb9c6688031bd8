#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "siegel/curve.hpp"

namespace siegel {

// Pinching of a sample pair: both arcs between the two samples include both
// endpoints, so min(diam_u, diam_v) >= dist and every pinch is >= 1. A round
// circle pinches to exactly 1.
struct PinchingReport {
  std::size_t i = 0, j = 0;  // i < j
  double dist = 0.0;
  double diam_u = 0.0;  // arc i -> j
  double diam_v = 0.0;  // arc j -> i (wrapping)
  double pinch = 0.0;
};

struct QuasicircleEstimate {
  double constant = 0.0;
  PinchingReport witness;
  bool exact = false;  // every unordered pair was evaluated
  std::size_t pairs_evaluated = 0;
};

struct RegularityProbe {
  double alpha = 0.0;         // fitted regularity exponent
  double fit_residual = 0.0;  // rms residual of the log-log fit
  std::size_t scales_used = 0;
  bool low_quality = false;  // residual above 0.25: exponent is dubious
};

struct StabilityCheck {
  bool holds = false;
  double k_prime = 0.0;  // predicted bound for the perturbed curve
  double eta = 0.0;      // sup-norm size of the perturbation
  double mu = 0.0;       // min distance between epsilon-separated samples
  double epsilon = 0.0;  // parameter separation backing mu
  double measured = 0.0; // measured constant of the perturbed curve
};

// Diameter of the closed arc of samples lo..hi inclusive; hi may run past
// size() to express wrapping, with hi - lo < size(). Exact pairwise scan up
// to 4096 points, convex hull + rotating calipers beyond (identical result:
// the farthest pair consists of hull vertices).
double arc_diameter(const SampledCurve& c, std::size_t lo, std::size_t hi);

// Single-pair pinching report. Throws CoincidentPoints when p_i == p_j.
PinchingReport pinch(const SampledCurve& c, std::size_t i, std::size_t j);

// Largest pinch over a pair set. All unordered pairs when M(M-1)/2 <= budget
// and M <= 2048 (flags exact); otherwise pairs at dyadic parameter
// separations, whose maximum never exceeds the all-pairs value.
QuasicircleEstimate quasicircle_constant(const SampledCurve& c,
                                         std::size_t pair_budget);

struct PinchProfile {
  std::vector<PinchingReport> rows;
  QuasicircleEstimate summary;
};

// Full report for every evaluated pair (same pair-set policy as
// quasicircle_constant).
PinchProfile pinch_profile(const SampledCurve& c, std::size_t pair_budget);

// CSV: i,j,t_i,t_j,dist,diam_u,diam_v,pinch with hex floats.
void write_pinch_csv(const PinchProfile& p, const SampledCurve& c,
                     const std::string& path);

// Symmetric Hausdorff distance between the two sample sets (no parameter
// alignment required).
double hausdorff_distance(const SampledCurve& a, const SampledCurve& b);

// max_k |a_k - b_k|. Throws GridMismatch unless the curves share a grid.
double sup_norm_distance(const SampledCurve& a, const SampledCurve& b);

// Fits max_k |c(t_k+s) - c(t_k)| ~ C s^alpha over dyadic index separations s
// with min_sep <= s/M <= max_sep. Needs at least 4 scales
// (InsufficientScales) and nonzero displacements (DegenerateFit).
RegularityProbe holder_exponent(const SampledCurve& c, double min_sep,
                                double max_sep);

// Sampled-curve analog of a perturbation bound for quasicircle constants:
// with eta = sup|f-g|, pick the smallest parameter separation epsilon whose
// minimum sample distance mu (over all separations >= epsilon) satisfies
// mu >= 8*eta; then pairs at least epsilon apart keep their pinch within a
// factor (mu+2*eta)/(mu-2*eta), predicting k_prime = k_base * that factor.
// `holds` requires the measured constant of g to stay below k_prime. When no
// such epsilon exists the bound is vacuous: holds=false, k_prime=inf.
StabilityCheck c1_stability(const SampledCurve& f, const SampledCurve& g,
                            double k_base, std::size_t pair_budget);

}  // namespace siegel
