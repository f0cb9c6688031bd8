#include "siegel/perturbation.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "siegel/errors.hpp"

namespace siegel {

namespace {

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

nlohmann::json witness_to_json(const PinchingReport& w) {
  return {{"i", w.i},
          {"j", w.j},
          {"dist_hex", hex_double(w.dist)},
          {"diam_u_hex", hex_double(w.diam_u)},
          {"diam_v_hex", hex_double(w.diam_v)},
          {"pinch_hex", hex_double(w.pinch)}};
}

PinchingReport witness_from_json(const nlohmann::json& j) {
  PinchingReport w;
  w.i = j.at("i").get<std::size_t>();
  w.j = j.at("j").get<std::size_t>();
  w.dist = parse_hex_double(j, "dist_hex");
  w.diam_u = parse_hex_double(j, "diam_u_hex");
  w.diam_v = parse_hex_double(j, "diam_v_hex");
  w.pinch = parse_hex_double(j, "pinch_hex");
  return w;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (series_N < 100) throw UsageError("experiment needs series_N >= 100");
  if (samples_M < 16) throw UsageError("experiment needs samples_M >= 16");
  if (precision_bits != 0 && precision_bits < 24) {
    throw UsageError("precision_bits must be 0 (auto) or >= 24");
  }
  if (!(pinch_threshold >= 1.0)) {
    throw UsageError("pinch_threshold below 1 is vacuous");
  }
  if (!(pinch_margin >= 0.0)) throw UsageError("pinch_margin must be >= 0");
  if (!(epsilon >= 0.0)) throw UsageError("epsilon must be >= 0");
  if (cut_lo < 1 || cut_hi < cut_lo) {
    throw UsageError("cut range must satisfy 1 <= cut_lo <= cut_hi");
  }
  if (tail_entries.empty()) {
    throw NoCandidates("experiment has an empty tail_entries family");
  }
  for (std::uint64_t a : tail_entries) {
    if (a < 1) throw UsageError("tail entries must be >= 1");
  }
  if (!(r1_frac > 0.0) || !(r2_frac > r1_frac) || !(r2_frac < 1.0)) {
    throw UsageError("radius window must satisfy 0 < r1_frac < r2_frac < 1");
  }
  if (!(grid_ratio > 1.0)) throw UsageError("grid_ratio must exceed 1");
  if (!(tail_tol > 0.0)) throw UsageError("tail_tol must be positive");
  if (pair_budget < 1) throw UsageError("pair_budget must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["theta_spec"] = theta_spec;
  j["series_N"] = series_N;
  j["samples_M"] = samples_M;
  j["precision_bits"] = precision_bits;
  j["pinch_threshold_hex"] = hex_double(pinch_threshold);
  j["pinch_margin_hex"] = hex_double(pinch_margin);
  j["epsilon_hex"] = hex_double(epsilon);
  j["cut_lo"] = cut_lo;
  j["cut_hi"] = cut_hi;
  j["tail_entries"] = tail_entries;
  j["r1_frac_hex"] = hex_double(r1_frac);
  j["r2_frac_hex"] = hex_double(r2_frac);
  j["grid_ratio_hex"] = hex_double(grid_ratio);
  j["tail_tol_hex"] = hex_double(tail_tol);
  j["pair_budget"] = pair_budget;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.theta_spec = j.at("theta_spec").get<std::string>();
    c.series_N = j.at("series_N").get<int>();
    c.samples_M = j.at("samples_M").get<int>();
    c.precision_bits = j.at("precision_bits").get<long>();
    c.pinch_threshold = parse_hex_double(j, "pinch_threshold_hex");
    c.pinch_margin = parse_hex_double(j, "pinch_margin_hex");
    c.epsilon = parse_hex_double(j, "epsilon_hex");
    c.cut_lo = j.at("cut_lo").get<int>();
    c.cut_hi = j.at("cut_hi").get<int>();
    c.tail_entries = j.at("tail_entries").get<std::vector<std::uint64_t>>();
    c.r1_frac = parse_hex_double(j, "r1_frac_hex");
    c.r2_frac = parse_hex_double(j, "r2_frac_hex");
    c.grid_ratio = parse_hex_double(j, "grid_ratio_hex");
    c.tail_tol = parse_hex_double(j, "tail_tol_hex");
    c.pair_budget = j.at("pair_budget").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

PinchScanResult pinch_radius_scan(const LinearizationSeries& s, double r_lo,
                                  double r_hi, double grid_ratio,
                                  double threshold, int M, double tail_tol,
                                  std::size_t pair_budget) {
  if (!(r_lo > 0.0) || !(r_hi >= r_lo)) {
    throw UsageError("radius window must satisfy 0 < r_lo <= r_hi");
  }
  if (!(grid_ratio > 1.0)) throw UsageError("grid_ratio must exceed 1");
  if (!(threshold >= 1.0)) {
    throw UsageError("pinch threshold below 1 is vacuous");
  }
  PinchScanResult res;
  const double hi = r_hi * (1.0 + 1e-12);
  for (double r = r_lo; r <= hi; r *= grid_ratio) {
    double tb = tail_bound(s, r);
    if (!(tb <= tail_tol)) {
      // the tail only grows with r: everything further is out of reach
      for (double rr = r; rr <= hi; rr *= grid_ratio) ++res.radii_skipped_tail;
      break;
    }
    SampledCurve c = sample_curve(s, r, M, tail_tol);
    QuasicircleEstimate q = quasicircle_constant(c, pair_budget);
    ++res.radii_scanned;
    if (q.constant > res.constant) {
      res.constant = q.constant;
      res.best_radius = r;
      res.witness = q.witness;
      res.tail_at_r = tb;
    }
    if (q.constant >= threshold) {
      res.found = true;
      res.r_star = r;
      res.constant = q.constant;
      res.witness = q.witness;
      res.tail_at_r = tb;
      break;
    }
  }
  return res;
}

TargetSearchResult radius_targeted_search(
    const RotationNumber& theta, double target_r, int cut,
    const std::vector<std::uint64_t>& tail_grid, int series_N,
    const LinearizeOptions& opts) {
  if (tail_grid.empty()) {
    throw NoCandidates("tail grid for the targeted radius search is empty");
  }
  if (!(target_r > 0.0) || !std::isfinite(target_r)) {
    throw UsageError("target radius must be positive and finite");
  }
  if (cut < 1) throw UsageError("approximant cut must be >= 1");

  std::optional<RotationNumber> best;
  std::uint64_t best_tail = 0;
  double achieved = 0.0;
  double best_miss = std::numeric_limits<double>::infinity();
  std::vector<TargetCandidate> cands;
  cands.reserve(tail_grid.size());
  for (std::uint64_t tail : tail_grid) {
    RotationNumber cand = bounded_type_approximant(theta, cut, tail);
    double est = linearize(cand, series_N, opts).radius_estimate;
    cands.push_back({tail, est});
    double miss = std::abs(est - target_r);
    if (miss < best_miss || (miss == best_miss && tail < best_tail)) {
      best.emplace(std::move(cand));
      best_tail = tail;
      achieved = est;
      best_miss = miss;
    }
  }
  double rel = best_miss / target_r;
  return TargetSearchResult{std::move(*best), best_tail, target_r,
                            achieved, rel, rel > 0.20, std::move(cands)};
}

ExperimentTrace run_perturbation(const ExperimentConfig& cfg) {
  cfg.validate();
  const mpfr_prec_t default_prec =
      cfg.precision_bits > 0 ? cfg.precision_bits : 256;
  RotationNumber theta = parse_theta_spec(cfg.theta_spec, default_prec);
  LinearizeOptions lopts;
  lopts.precision_bits = cfg.precision_bits;
  LinearizationSeries base = linearize(theta, cfg.series_N, lopts);

  ExperimentTrace tr;
  tr.config = cfg;
  tr.base_theta_spec = theta.canonical_spec();
  tr.base_precision_bits = base.precision_bits;
  tr.base_radius_estimate = base.radius_estimate;
  tr.base_min_divisor = base.min_divisor;

  const double threshold = cfg.pinch_threshold + cfg.pinch_margin;
  for (int cut = cfg.cut_lo; cut <= cfg.cut_hi; ++cut) {
    for (std::uint64_t tail : cfg.tail_entries) {
      ExperimentRound rd;
      rd.cut = cut;
      rd.tail_entry = tail;
      try {
        RotationNumber thn = bounded_type_approximant(theta, cut, tail);
        rd.theta_spec = thn.canonical_spec();
        rd.theta_drift = (thn.value() - theta.value()).abs().to_double();
        if (rd.theta_drift > cfg.epsilon) {
          rd.status = "not_found";
          rd.reason = "angle drift " + std::to_string(rd.theta_drift) +
                      " exceeds epsilon " + std::to_string(cfg.epsilon);
          tr.rounds.push_back(rd);
          continue;
        }
        LinearizationSeries sn = linearize(thn, cfg.series_N, lopts);
        rd.precision_bits = sn.precision_bits;
        rd.radius_estimate = sn.radius_estimate;
        rd.min_divisor = sn.min_divisor;
        PinchScanResult sr = pinch_radius_scan(
            sn, cfg.r1_frac * sn.radius_estimate,
            cfg.r2_frac * sn.radius_estimate, cfg.grid_ratio, threshold,
            cfg.samples_M, cfg.tail_tol, cfg.pair_budget);
        rd.radii_scanned = sr.radii_scanned;
        rd.constant = sr.constant;
        rd.best_radius = sr.best_radius;
        rd.tail_at_r = sr.tail_at_r;
        rd.witness = sr.witness;
        if (sr.found) {
          rd.status = "found";
          rd.r_star = sr.r_star;
          SampledCurve cn = sample_curve(sn, sr.r_star, cfg.samples_M,
                                         cfg.tail_tol);
          if (tail_bound(base, sr.r_star) <= cfg.tail_tol) {
            SampledCurve cb = sample_curve(base, sr.r_star, cfg.samples_M,
                                           cfg.tail_tol);
            rd.hausdorff_to_base = hausdorff_distance(cn, cb);
          }
          std::complex<double> lam(sn.lambda.re.to_double(),
                                   sn.lambda.im.to_double());
          double rmid = 0.5 * sn.radius_estimate;
          double rfar = 0.99 * sn.radius_estimate;
          rd.cp_dist_mid = critical_point_distance(
              sample_curve(sn, rmid, cfg.samples_M, cfg.tail_tol), lam);
          if (tail_bound(sn, rfar) <= cfg.tail_tol) {
            rd.cp_dist_far = critical_point_distance(
                sample_curve(sn, rfar, cfg.samples_M, cfg.tail_tol), lam);
            rd.herman_shadow_ok = rd.cp_dist_far < rd.cp_dist_mid;
          }
          ++tr.found_count;
        } else {
          rd.status = "not_found";
          rd.reason = sr.radii_scanned == 0
                          ? "no radius in the window satisfies the tail "
                            "tolerance"
                          : "max pinch " + std::to_string(sr.constant) +
                                " stayed below threshold " +
                                std::to_string(threshold);
        }
      } catch (const PrecisionExhausted& e) {
        rd.status = "precision_limit";
        rd.reason = e.what();
      }
      tr.rounds.push_back(rd);
    }
  }
  tr.target_unreachable = tr.found_count == 0;
  return tr;
}

namespace {

nlohmann::json round_to_json(const ExperimentRound& r) {
  nlohmann::json j;
  j["type"] = "round";
  j["cut"] = r.cut;
  j["tail_entry"] = r.tail_entry;
  j["theta_spec"] = r.theta_spec;
  j["theta_drift_hex"] = hex_double(r.theta_drift);
  j["status"] = r.status;
  j["reason"] = r.reason;
  j["precision_bits"] = r.precision_bits;
  j["radius_estimate_hex"] = hex_double(r.radius_estimate);
  j["min_divisor_hex"] = hex_double(r.min_divisor);
  j["r_star_hex"] = hex_double(r.r_star);
  j["constant_hex"] = hex_double(r.constant);
  j["best_radius_hex"] = hex_double(r.best_radius);
  j["tail_at_r_hex"] = hex_double(r.tail_at_r);
  j["radii_scanned"] = r.radii_scanned;
  j["witness"] = witness_to_json(r.witness);
  j["hausdorff_to_base_hex"] = hex_double(r.hausdorff_to_base);
  j["cp_dist_mid_hex"] = hex_double(r.cp_dist_mid);
  j["cp_dist_far_hex"] = hex_double(r.cp_dist_far);
  j["herman_shadow_ok"] = r.herman_shadow_ok;
  return j;
}

ExperimentRound round_from_json(const nlohmann::json& j) {
  ExperimentRound r;
  r.cut = j.at("cut").get<int>();
  r.tail_entry = j.at("tail_entry").get<std::uint64_t>();
  r.theta_spec = j.at("theta_spec").get<std::string>();
  r.theta_drift = parse_hex_double(j, "theta_drift_hex");
  r.status = j.at("status").get<std::string>();
  r.reason = j.at("reason").get<std::string>();
  r.precision_bits = j.at("precision_bits").get<long>();
  r.radius_estimate = parse_hex_double(j, "radius_estimate_hex");
  r.min_divisor = parse_hex_double(j, "min_divisor_hex");
  r.r_star = parse_hex_double(j, "r_star_hex");
  r.constant = parse_hex_double(j, "constant_hex");
  r.best_radius = parse_hex_double(j, "best_radius_hex");
  r.tail_at_r = parse_hex_double(j, "tail_at_r_hex");
  r.radii_scanned = j.at("radii_scanned").get<int>();
  r.witness = witness_from_json(j.at("witness"));
  r.hausdorff_to_base = parse_hex_double(j, "hausdorff_to_base_hex");
  r.cp_dist_mid = parse_hex_double(j, "cp_dist_mid_hex");
  r.cp_dist_far = parse_hex_double(j, "cp_dist_far_hex");
  r.herman_shadow_ok = j.at("herman_shadow_ok").get<bool>();
  return r;
}

}  // namespace

std::string trace_to_jsonl(const ExperimentTrace& t) {
  std::ostringstream out;
  nlohmann::json header;
  header["type"] = "header";
  header["config"] = t.config.to_json();
  header["base"] = {{"theta_spec", t.base_theta_spec},
                    {"precision_bits", t.base_precision_bits},
                    {"radius_estimate_hex", hex_double(t.base_radius_estimate)},
                    {"min_divisor_hex", hex_double(t.base_min_divisor)}};
  out << header.dump() << "\n";
  for (const ExperimentRound& r : t.rounds) {
    out << round_to_json(r).dump() << "\n";
  }
  nlohmann::json summary;
  summary["type"] = "summary";
  summary["found_count"] = t.found_count;
  summary["target_unreachable"] = t.target_unreachable;
  out << summary.dump() << "\n";
  return out.str();
}

void write_trace_jsonl(const ExperimentTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << trace_to_jsonl(t);
  if (!out) throw UsageError("write to '" + path + "' failed");
}

ExperimentTrace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open trace file '" + path + "'");
  ExperimentTrace t;
  std::string line;
  bool header_seen = false, summary_seen = false;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        t.config = ExperimentConfig::from_json(j.at("config"));
        t.base_theta_spec = j.at("base").at("theta_spec").get<std::string>();
        t.base_precision_bits = j.at("base").at("precision_bits").get<long>();
        t.base_radius_estimate =
            parse_hex_double(j.at("base"), "radius_estimate_hex");
        t.base_min_divisor = parse_hex_double(j.at("base"), "min_divisor_hex");
        header_seen = true;
      } else if (type == "round") {
        t.rounds.push_back(round_from_json(j));
      } else if (type == "summary") {
        t.found_count = j.at("found_count").get<int>();
        t.target_unreachable = j.at("target_unreachable").get<bool>();
        summary_seen = true;
      } else {
        throw UsageError("unknown trace line type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("trace file '" + path + "' is malformed: " + e.what());
  }
  if (!header_seen || !summary_seen) {
    throw UsageError("trace file '" + path + "' is incomplete");
  }
  return t;
}

std::string summarize_trace(const ExperimentTrace& t) {
  char buf[256];
  std::ostringstream out;
  std::snprintf(buf, sizeof buf,
                "base %s  N=%d  prec=%ld  radius_estimate=%.6g\n",
                t.base_theta_spec.c_str(), t.config.series_N,
                t.base_precision_bits, t.base_radius_estimate);
  out << buf;
  for (const ExperimentRound& r : t.rounds) {
    std::snprintf(buf, sizeof buf,
                  "round cut=%d tail=%llu  %s  drift=%.3g radius=%.6g "
                  "pinch=%.4g",
                  r.cut, static_cast<unsigned long long>(r.tail_entry),
                  r.status.c_str(), r.theta_drift, r.radius_estimate,
                  r.constant);
    out << buf;
    if (r.status == "found") {
      std::snprintf(buf, sizeof buf, " at r=%.6g (pair %zu,%zu)", r.r_star,
                    r.witness.i, r.witness.j);
      out << buf;
    } else if (!r.reason.empty()) {
      out << "  (" << r.reason << ")";
    }
    out << "\n";
  }
  out << "found " << t.found_count << "/" << t.rounds.size() << " rounds";
  if (t.target_unreachable) out << "  [target unreachable at this budget]";
  out << "\n";
  return out.str();
}

}  // namespace siegel
