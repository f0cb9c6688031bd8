#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "siegel/curvegeom.hpp"
#include "siegel/linearization.hpp"
#include "siegel/rotation.hpp"

namespace siegel {

// Scans sampling radii r_lo, r_lo*grid_ratio, ... <= r_hi (ascending) and
// stops at the first radius whose curve pinches >= threshold, approximating
// the infimum radius with that property. Radii whose truncation tail exceeds
// tail_tol are skipped and counted separately.
struct PinchScanResult {
  bool found = false;
  double r_star = 0.0;    // first radius reaching the threshold
  double constant = 0.0;  // pinch there (or the best seen when !found)
  double best_radius = 0.0;
  double tail_at_r = 0.0;  // truncation tail bound at r_star/best_radius
  PinchingReport witness;
  int radii_scanned = 0;
  int radii_skipped_tail = 0;
};

PinchScanResult pinch_radius_scan(const LinearizationSeries& s, double r_lo,
                                  double r_hi, double grid_ratio,
                                  double threshold, int M, double tail_tol,
                                  std::size_t pair_budget);

// Steers the conformal radius toward target_r by choosing, at a fixed cut,
// the constant-tail entry whose approximant's estimated radius lands closest.
// Ties go to the smaller tail entry. target_unreachable flags a best relative
// miss above 20%; the argmin is still returned.
struct TargetCandidate {
  std::uint64_t tail_entry;
  double radius_estimate;
};

struct TargetSearchResult {
  RotationNumber best;
  std::uint64_t best_tail;
  double target_r;
  double achieved_r;
  double relative_miss;
  bool target_unreachable;
  std::vector<TargetCandidate> candidates;  // grid order
};

TargetSearchResult radius_targeted_search(
    const RotationNumber& theta, double target_r, int cut,
    const std::vector<std::uint64_t>& tail_grid, int series_N = 1000,
    const LinearizeOptions& opts = {});

// One experiment: around a base angle theta, walk the two-parameter family of
// bounded-type approximants (cut, tail_entry), and for each candidate look
// for a radius where the boundary curve develops a pinch of at least
// pinch_threshold + pinch_margin while the angle stays within epsilon of the
// base. Candidates whose angle drifts beyond epsilon are reported, not
// silently dropped; precision failures become their own round status.
struct ExperimentConfig {
  std::string theta_spec = "golden";
  int series_N = 2000;
  int samples_M = 512;
  long precision_bits = 0;  // 0 = per-candidate planner
  double pinch_threshold = 2.0;
  double pinch_margin = 1.0;
  double epsilon = 0.25;  // max |theta_candidate - theta|; 0 rejects all
  int cut_lo = 5;
  int cut_hi = 8;
  std::vector<std::uint64_t> tail_entries = {10, 100, 1000};
  double r1_frac = 0.90;    // scan window, as fractions of the candidate's
  double r2_frac = 0.9985;  // radius estimate
  double grid_ratio = 1.002;
  double tail_tol = 2e-3;
  std::size_t pair_budget = 600000;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  void validate() const;  // throws UsageError / NoCandidates
};

struct ExperimentRound {
  int cut = 0;
  std::uint64_t tail_entry = 0;
  std::string theta_spec;  // canonical spec of the candidate
  double theta_drift = 0.0;
  std::string status;  // "found" | "not_found" | "precision_limit"
  std::string reason;  // non-empty unless found
  long precision_bits = 0;
  double radius_estimate = 0.0;
  double min_divisor = 0.0;
  double r_star = 0.0;
  double constant = 0.0;
  double best_radius = 0.0;
  double tail_at_r = 0.0;
  int radii_scanned = 0;
  PinchingReport witness;
  double hausdorff_to_base = -1.0;  // -1 when not computed
  // diagnostic: critical-point distance should shrink toward the boundary
  double cp_dist_mid = 0.0;  // at 0.5 * radius_estimate
  double cp_dist_far = 0.0;  // at 0.99 * radius_estimate
  bool herman_shadow_ok = false;
};

struct ExperimentTrace {
  ExperimentConfig config;
  std::string base_theta_spec;
  long base_precision_bits = 0;
  double base_radius_estimate = 0.0;
  double base_min_divisor = 0.0;
  std::vector<ExperimentRound> rounds;
  int found_count = 0;
  // informational: every round ended without a find (maps to a dedicated
  // process exit code, not an exception -- failure at a fixed budget is data)
  bool target_unreachable = false;
};

ExperimentTrace run_perturbation(const ExperimentConfig& config);

// JSONL: a header line, one line per round, a summary line; floats in hex so
// identical configs yield byte-identical traces.
void write_trace_jsonl(const ExperimentTrace& t, const std::string& path);
ExperimentTrace read_trace_jsonl(const std::string& path);
std::string trace_to_jsonl(const ExperimentTrace& t);

// Short human-readable digest (decimal, for terminals; files stay hex).
std::string summarize_trace(const ExperimentTrace& t);

}  // namespace siegel
