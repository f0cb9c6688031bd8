#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "siegel/curve.hpp"
#include "siegel/curvegeom.hpp"
#include "siegel/errors.hpp"
#include "siegel/kernels.hpp"
#include "siegel/linearization.hpp"
#include "siegel/manifest.hpp"
#include "siegel/perturbation.hpp"
#include "siegel/rotation.hpp"

namespace {

using nlohmann::json;
using namespace siegel;

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double json_hex(const json& j, const char* key) {
  std::string s = j.at(key).get<std::string>();
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw UsageError(std::string("bad float for '") + key + "': " + s);
  }
  return v;
}

long env_precision_bits() {
  const char* e = std::getenv("SIEGLAB_PRECISION_BITS");
  if (e == nullptr || *e == '\0') return 0;
  char* end = nullptr;
  long v = std::strtol(e, &end, 10);
  if (*end != '\0' || v < 0) {
    throw UsageError("SIEGLAB_PRECISION_BITS must be a nonnegative integer");
  }
  return v;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Every produced file gets a manifest next to the first output; the manifest
// alone suffices to repeat the run (`rerun --manifest`).
void finish_manifest(const std::string& subcommand, const json& resolved,
                     long precision_bits,
                     const std::vector<std::string>& inputs,
                     const std::vector<std::string>& outputs,
                     const Timer& timer) {
  if (outputs.empty()) return;
  RunManifest m;
  m.subcommand = subcommand;
  m.resolved = resolved;
  m.precision_bits = precision_bits;
  for (const std::string& p : inputs) m.inputs.push_back(stamp_file(p));
  for (const std::string& p : outputs) m.outputs.push_back(stamp_file(p));
  m.duration_seconds = timer.seconds();
  m.write(manifest_path_for(outputs.front()));
}

mpfr_prec_t theta_parse_prec(long precision_bits) {
  return precision_bits > 0 ? precision_bits : 256;
}

int exec_radius(const json& a) {
  Timer timer;
  const std::string theta_spec = a.at("theta_spec").get<std::string>();
  const int N = a.at("N").get<int>();
  const long precision_bits = a.at("precision_bits").get<long>();
  const int fit_lo = a.at("fit_lo").get<int>();
  const int fit_hi = a.at("fit_hi").get<int>();
  const std::string out = a.at("out").get<std::string>();
  const std::string series_out = a.at("series_out").get<std::string>();

  RotationNumber theta =
      parse_theta_spec(theta_spec, theta_parse_prec(precision_bits));
  LinearizeOptions opts;
  opts.precision_bits = precision_bits;
  LinearizationSeries s = linearize(theta, N, opts);
  const int lo = fit_lo > 0 ? fit_lo : N / 2;
  const int hi = fit_hi > 0 ? fit_hi : N;
  RadiusFit fit = estimate_radius(s, lo, hi);

  std::printf("theta                 %s\n", theta.canonical_spec().c_str());
  std::printf("N                     %d\n", N);
  std::printf("precision_bits        %ld\n",
              static_cast<long>(s.precision_bits));
  std::printf("radius_estimate       %.17g (%a)\n", fit.radius, fit.radius);
  std::printf("fit_slope             %.17g\n", fit.slope);
  std::printf("fit_residual          %.17g\n", fit.fit_residual);
  std::printf("fit_points            %zu\n", fit.points);
  std::printf("min_divisor           %.17g (%a)\n", s.min_divisor,
              s.min_divisor);
  std::printf("worst_rel_error_log2  %.17g\n", s.worst_rel_error_log2);

  std::vector<std::string> outputs;
  if (!out.empty()) {
    json rep;
    rep["theta_spec"] = theta.canonical_spec();
    rep["N"] = N;
    rep["precision_bits"] = static_cast<long>(s.precision_bits);
    rep["radius_estimate_hex"] = hex_double(fit.radius);
    rep["fit_slope_hex"] = hex_double(fit.slope);
    rep["fit_residual_hex"] = hex_double(fit.fit_residual);
    rep["fit_points"] = fit.points;
    rep["min_divisor_hex"] = hex_double(s.min_divisor);
    rep["worst_rel_error_log2_hex"] = hex_double(s.worst_rel_error_log2);
    rep["lambda_hex"] = {s.lambda.re.to_hex(), s.lambda.im.to_hex()};
    std::ofstream f(out);
    if (!f) throw UsageError("cannot open '" + out + "' for writing");
    f << rep.dump(1) << "\n";
    outputs.push_back(out);
  }
  if (!series_out.empty()) {
    save_series(s, series_out);
    outputs.push_back(series_out);
  }
  finish_manifest("radius", a, static_cast<long>(s.precision_bits), {}, outputs, timer);
  return 0;
}

int exec_boundary(const json& a) {
  Timer timer;
  const std::string theta_spec = a.at("theta_spec").get<std::string>();
  const int N = a.at("N").get<int>();
  const long precision_bits = a.at("precision_bits").get<long>();
  const int M = a.at("M").get<int>();
  const double r_frac = json_hex(a, "r_frac_hex");
  const double r_abs = json_hex(a, "r_abs_hex");
  const double tail_tol = json_hex(a, "tail_tol_hex");
  const std::string out = a.at("out").get<std::string>();

  RotationNumber theta =
      parse_theta_spec(theta_spec, theta_parse_prec(precision_bits));
  LinearizeOptions opts;
  opts.precision_bits = precision_bits;
  LinearizationSeries s = linearize(theta, N, opts);
  double r = r_abs;
  if (r_abs <= 0.0) {
    if (!(r_frac > 0.0) || !(r_frac < 1.0)) {
      throw UsageError("--r-frac must lie in (0, 1)");
    }
    r = r_frac * s.radius_estimate;
  }
  SampledCurve c = sample_curve(s, r, M, tail_tol);
  c.write_csv(out);
  std::printf("wrote %d samples on |z| = %.17g (tail bound %.6g) to %s\n", M,
              r, tail_bound(s, r), out.c_str());
  finish_manifest("boundary", a, static_cast<long>(s.precision_bits), {}, {out}, timer);
  return 0;
}

int exec_pinch_profile(const json& a) {
  Timer timer;
  const std::string curve = a.at("curve").get<std::string>();
  const std::size_t budget = a.at("pair_budget").get<std::size_t>();
  const std::string out = a.at("out").get<std::string>();

  SampledCurve c = SampledCurve::read_csv(curve);
  PinchProfile prof = pinch_profile(c, budget);
  write_pinch_csv(prof, c, out);
  const QuasicircleEstimate& q = prof.summary;
  std::printf(
      "max pinch %.17g at pair (%zu, %zu): dist %.6g, diam_u %.6g, "
      "diam_v %.6g\n",
      q.constant, q.witness.i, q.witness.j, q.witness.dist, q.witness.diam_u,
      q.witness.diam_v);
  std::printf("pairs_evaluated %zu (%s)\n", q.pairs_evaluated,
              q.exact ? "all pairs" : "dyadic subsample, lower bound");
  finish_manifest("pinch-profile", a, 53, {curve}, {out}, timer);
  return 0;
}

int exec_experiment(const json& a) {
  Timer timer;
  ExperimentConfig cfg = ExperimentConfig::from_json(a.at("config"));
  const std::string out = a.at("out").get<std::string>();

  ExperimentTrace tr = run_perturbation(cfg);
  write_trace_jsonl(tr, out);
  std::fputs(summarize_trace(tr).c_str(), stdout);
  finish_manifest("experiment", a, tr.base_precision_bits, {}, {out}, timer);
  // informational failure: artifacts are valid, the search met no target
  return tr.target_unreachable ? 5 : 0;
}

int exec_resolved(const std::string& subcommand, const json& resolved) {
  if (subcommand == "radius") return exec_radius(resolved);
  if (subcommand == "boundary") return exec_boundary(resolved);
  if (subcommand == "pinch-profile") return exec_pinch_profile(resolved);
  if (subcommand == "experiment") return exec_experiment(resolved);
  throw UsageError("manifest names unknown subcommand '" + subcommand + "'");
}

int exec_rerun(const std::string& manifest_path) {
  RunManifest m = RunManifest::load(manifest_path);
  int code = exec_resolved(m.subcommand, m.resolved);
  bool all_match = true;
  for (const FileStamp& old : m.outputs) {
    FileStamp fresh = stamp_file(old.path);
    bool match = fresh.bytes == old.bytes && fresh.fnv1a64 == old.fnv1a64;
    std::printf("output %s: %s\n", old.path.c_str(),
                match ? "reproduced byte-for-byte"
                      : "DIFFERS from the manifest");
    all_match = all_match && match;
  }
  if (!all_match) return 1;
  return code;
}

// ---- flag wiring ----------------------------------------------------------

struct RadiusArgs {
  std::string theta;
  int N = 1000;
  long precision_bits = 0;
  std::string fit_window;
  std::string out, series_out;
};

std::pair<int, int> parse_fit_window(const std::string& s) {
  if (s.empty()) return {0, 0};
  std::size_t colon = s.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--fit-window expects LO:HI");
  }
  try {
    int lo = std::stoi(s.substr(0, colon));
    int hi = std::stoi(s.substr(colon + 1));
    if (lo < 1 || hi <= lo) throw UsageError("--fit-window needs 1 <= LO < HI");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--fit-window expects integer LO:HI");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadratic Siegel disk laboratory"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  RadiusArgs ra;
  CLI::App* radius = app.add_subcommand(
      "radius", "linearize and estimate the conformal radius");
  radius->add_option("--theta", ra.theta, "rotation number spec")->required();
  radius->add_option("--N", ra.N, "series length");
  radius->add_option("--precision-bits", ra.precision_bits,
                     "working precision (0 = plan from the angle)");
  radius->add_option("--fit-window", ra.fit_window,
                     "slope-fit window LO:HI (default N/2:N)");
  radius->add_option("--out", ra.out, "radius report (JSON)");
  radius->add_option("--series-out", ra.series_out,
                     "series checkpoint (JSON)");

  struct {
    std::string theta;
    int N = 1000;
    long precision_bits = 0;
    int M = 256;
    double r_frac = 0.5;
    double r_abs = 0.0;
    double tail_tol = 1e-8;
    std::string out;
  } ba;
  CLI::App* boundary = app.add_subcommand(
      "boundary", "sample the linearization on a circle |z| = r");
  boundary->add_option("--theta", ba.theta, "rotation number spec")
      ->required();
  boundary->add_option("--N", ba.N, "series length");
  boundary->add_option("--precision-bits", ba.precision_bits,
                       "working precision (0 = plan from the angle)");
  boundary->add_option("--M", ba.M, "sample count");
  boundary->add_option("--r-frac", ba.r_frac,
                       "radius as a fraction of the radius estimate");
  boundary->add_option("--r-abs", ba.r_abs,
                       "absolute radius (overrides --r-frac)");
  boundary->add_option("--tail-tol", ba.tail_tol,
                       "max acceptable truncation tail");
  boundary->add_option("--out", ba.out, "curve CSV")->required();

  struct {
    std::string curve;
    std::size_t budget = 600000;
    std::string out;
  } pa;
  CLI::App* pinchp = app.add_subcommand(
      "pinch-profile", "pinching report over sample pairs of a curve");
  pinchp->add_option("--curve", pa.curve, "curve CSV")->required();
  pinchp->add_option("--budget", pa.budget,
                     "max pairs before dyadic subsampling");
  pinchp->add_option("--out", pa.out, "pinch CSV")->required();

  struct {
    std::string config;
    std::string out;
    bool print_config = false;
    std::string theta;
    int N = 0, M = 0;
    long precision_bits = -1;
    double threshold = 0, margin = -1, epsilon = -1;
    int cut_lo = 0, cut_hi = 0;
    std::vector<std::uint64_t> tails;
    double r1_frac = 0, r2_frac = 0, grid_ratio = 0, tail_tol = 0;
    std::size_t budget = 0;
  } ea;
  CLI::App* exper = app.add_subcommand(
      "experiment", "bounded-type perturbation rounds with a pinch target");
  exper->add_option("--config", ea.config, "experiment config (JSON)");
  exper->add_option("--out", ea.out, "trace output (JSON lines)");
  exper->add_flag("--print-config", ea.print_config,
                  "print the resolved config and exit");
  CLI::Option* o_theta =
      exper->add_option("--theta", ea.theta, "rotation number spec");
  CLI::Option* o_N = exper->add_option("--N", ea.N, "series length");
  CLI::Option* o_M = exper->add_option("--M", ea.M, "curve sample count");
  CLI::Option* o_prec = exper->add_option("--precision-bits",
                                          ea.precision_bits,
                                          "working precision (0 = planner)");
  CLI::Option* o_thr =
      exper->add_option("--threshold", ea.threshold, "pinch target K");
  CLI::Option* o_mar =
      exper->add_option("--margin", ea.margin, "required excess over K");
  CLI::Option* o_eps =
      exper->add_option("--epsilon", ea.epsilon, "max drift from the base");
  CLI::Option* o_clo =
      exper->add_option("--cut-lo", ea.cut_lo, "smallest prefix cut");
  CLI::Option* o_chi =
      exper->add_option("--cut-hi", ea.cut_hi, "largest prefix cut");
  CLI::Option* o_tails =
      exper->add_option("--tails", ea.tails, "inserted tail entries")
          ->delimiter(',');
  CLI::Option* o_r1 = exper->add_option("--r1-frac", ea.r1_frac,
                                        "scan start as a radius fraction");
  CLI::Option* o_r2 = exper->add_option("--r2-frac", ea.r2_frac,
                                        "scan end as a radius fraction");
  CLI::Option* o_ratio = exper->add_option("--grid-ratio", ea.grid_ratio,
                                           "geometric scan step");
  CLI::Option* o_ttol = exper->add_option("--tail-tol", ea.tail_tol,
                                          "max acceptable truncation tail");
  CLI::Option* o_budget = exper->add_option("--pair-budget", ea.budget,
                                            "max pairs per pinch profile");

  struct {
    std::string manifest;
  } rr;
  CLI::App* rerun = app.add_subcommand(
      "rerun", "repeat a run from its manifest and verify the outputs");
  rerun->add_option("--manifest", rr.manifest, "manifest written by a run")
      ->required();

  CLI::App* kern = app.add_subcommand(
      "kernels", "report the active distance/evaluation backend");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
      std::fprintf(stderr, "sieglab: UsageError: %s\n", e.what());
      return static_cast<int>(ErrorClass::Usage);
    }

    const long env_prec = env_precision_bits();

    if (radius->parsed()) {
      auto [flo, fhi] = parse_fit_window(ra.fit_window);
      json a;
      a["theta_spec"] = ra.theta;
      a["N"] = ra.N;
      a["precision_bits"] = radius->count("--precision-bits")
                                ? ra.precision_bits
                                : (env_prec > 0 ? env_prec : ra.precision_bits);
      a["fit_lo"] = flo;
      a["fit_hi"] = fhi;
      a["out"] = ra.out;
      a["series_out"] = ra.series_out;
      return exec_radius(a);
    }
    if (boundary->parsed()) {
      json a;
      a["theta_spec"] = ba.theta;
      a["N"] = ba.N;
      a["precision_bits"] =
          boundary->count("--precision-bits")
              ? ba.precision_bits
              : (env_prec > 0 ? env_prec : ba.precision_bits);
      a["M"] = ba.M;
      a["r_frac_hex"] = hex_double(ba.r_frac);
      a["r_abs_hex"] = hex_double(ba.r_abs);
      a["tail_tol_hex"] = hex_double(ba.tail_tol);
      a["out"] = ba.out;
      return exec_boundary(a);
    }
    if (pinchp->parsed()) {
      json a;
      a["curve"] = pa.curve;
      a["pair_budget"] = pa.budget;
      a["out"] = pa.out;
      return exec_pinch_profile(a);
    }
    if (exper->parsed()) {
      ExperimentConfig cfg;
      if (!ea.config.empty()) {
        std::ifstream f(ea.config);
        if (!f) throw UsageError("cannot open config '" + ea.config + "'");
        json j;
        try {
          f >> j;
        } catch (const json::exception& e) {
          throw UsageError("config '" + ea.config +
                           "' is not valid JSON: " + e.what());
        }
        cfg = ExperimentConfig::from_json(j);
      }
      if (o_theta->count()) cfg.theta_spec = ea.theta;
      if (o_N->count()) cfg.series_N = ea.N;
      if (o_M->count()) cfg.samples_M = ea.M;
      if (o_prec->count()) {
        cfg.precision_bits = ea.precision_bits;
      } else if (ea.config.empty() && env_prec > 0) {
        cfg.precision_bits = env_prec;
      }
      if (o_thr->count()) cfg.pinch_threshold = ea.threshold;
      if (o_mar->count()) cfg.pinch_margin = ea.margin;
      if (o_eps->count()) cfg.epsilon = ea.epsilon;
      if (o_clo->count()) cfg.cut_lo = ea.cut_lo;
      if (o_chi->count()) cfg.cut_hi = ea.cut_hi;
      if (o_tails->count()) cfg.tail_entries = ea.tails;
      if (o_r1->count()) cfg.r1_frac = ea.r1_frac;
      if (o_r2->count()) cfg.r2_frac = ea.r2_frac;
      if (o_ratio->count()) cfg.grid_ratio = ea.grid_ratio;
      if (o_ttol->count()) cfg.tail_tol = ea.tail_tol;
      if (o_budget->count()) cfg.pair_budget = ea.budget;
      cfg.validate();
      if (ea.print_config) {
        std::printf("%s\n", cfg.to_json().dump(1).c_str());
        return 0;
      }
      if (ea.out.empty()) {
        throw UsageError("experiment needs --out (or --print-config)");
      }
      json a;
      a["config"] = cfg.to_json();
      a["out"] = ea.out;
      return exec_experiment(a);
    }
    if (rerun->parsed()) return exec_rerun(rr.manifest);
    if (kern->parsed()) {
      std::printf("active  %s\n", kernels::active().name);
      std::printf("avx2    %s\n",
                  kernels::avx2_supported() ? "supported" : "unavailable");
      return 0;
    }
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "sieglab: %s\n", e.what());
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sieglab: internal error: %s\n", e.what());
    return 1;
  }
}
