// Acceptance gate: nine numbered criteria, one PASS/FAIL line each.
// Exit 0 only if every criterion passes. argv[1] must name the CLI binary.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "siegel/curvegeom.hpp"
#include "siegel/linearization.hpp"
#include "siegel/perturbation.hpp"
#include "siegel/rotation.hpp"

namespace fs = std::filesystem;
using namespace siegel;

namespace {

std::string g_cli;
int g_failures = 0;

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
};

void report(const Criterion& c, bool ok, double elapsed,
            const std::string& detail) {
  bool timely = elapsed < c.time_limit_s;
  std::printf("%s  criterion %d: %s (%s; %.2f s < %.0f s)\n",
              (ok && timely) ? "PASS" : "FAIL", c.id, c.name, detail.c_str(),
              elapsed, c.time_limit_s);
  if (!ok || !timely) ++g_failures;
}

void run_criterion(const Criterion& c,
                   const std::function<bool(std::string&)>& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("threw ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(c, ok, elapsed, detail);
}

struct Cmd {
  int code = -1;
  std::string out;
};

Cmd cli(const std::string& args) {
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Cmd r;
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

char fmt_buf[512];
template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(fmt_buf, sizeof fmt_buf, f, a...);
  return fmt_buf;
}

// ---- criteria ----

// 1. residual of the truncated conjugacy at half the radius estimate
void c1() {
  run_criterion({1, "functional-equation certificate", 10.0},
                [](std::string& d) {
    LinearizationSeries s = linearize(RotationNumber::golden(256), 1000, {});
    ResidualReport r = residual(s, 0.5 * s.radius_estimate, 256);
    d = fmt("max residual %.3e < 1e-10", r.max_residual);
    return r.max_residual < 1e-10;
  });
}

// 2. radius sanity (0 < r < 4) and stability in N for two angles
void c2() {
  run_criterion({2, "radius sanity and stability", 120.0},
                [](std::string& d) {
    bool ok = true;
    std::string parts;
    for (const char* spec : {"golden", "silver"}) {
      auto t0 = std::chrono::steady_clock::now();
      RotationNumber th = parse_theta_spec(spec, 256);
      double r2 = linearize(th, 2000, {}).radius_estimate;
      double r4 = linearize(th, 4000, {}).radius_estimate;
      double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      double rel = std::abs(r2 - r4) / r4;
      ok = ok && r2 > 0.0 && r2 < 4.0 && r4 > 0.0 && r4 < 4.0 && rel < 1e-2 &&
           secs < 60.0;
      parts += fmt("%s: r2000 %.6f, r4000 %.6f, rel %.2e in %.1f s; ", spec,
                   r2, r4, rel, secs);
    }
    d = parts + "bounds (0,4), drift < 1e-2, < 60 s each";
    return ok;
  });
}

// 3. a sampled round circle is a 1-quasicircle, every pair evaluated
void c3() {
  run_criterion({3, "round-circle pinch", 30.0}, [](std::string& d) {
    SampledCurve c = fixtures::circle(1024);
    PinchProfile prof = pinch_profile(c, 1u << 20);
    if (!prof.summary.exact) {
      d = "expected the all-pairs mode";
      return false;
    }
    double worst = 0.0;
    for (const PinchingReport& r : prof.rows) {
      worst = std::max(worst, std::abs(r.pinch - 1.0));
    }
    double kdev = std::abs(prof.summary.constant - 1.0);
    d = fmt("%zu pairs, max |pinch-1| %.2e < 1e-3, |K-1| %.2e < 1e-3",
            prof.rows.size(), worst, kdev);
    return worst < 1e-3 && kdev < 1e-3;
  });
}

// 4. perturbation bound K' = K (mu+2eta)/(mu-2eta) on 100 seeded bumps
void c4() {
  run_criterion({4, "quasicircle stability bound", 60.0},
                [](std::string& d) {
    SampledCurve base = fixtures::circle(256);
    double k_base = quasicircle_constant(base, 1u << 20).constant;
    std::mt19937 rng(20260815u);
    std::uniform_real_distribution<double> eta_d(0.002, 0.02);
    std::uniform_int_distribution<int> mode_d(1, 4);
    std::uniform_real_distribution<double> phase_d(0.0, 6.28);
    double worst_slack = -1e9;
    for (int trial = 0; trial < 100; ++trial) {
      double eta = eta_d(rng);
      SampledCurve g =
          fixtures::radial_bump(256, eta, mode_d(rng), phase_d(rng));
      StabilityCheck chk = c1_stability(base, g, k_base, 1u << 20);
      if (!chk.holds || !(chk.eta < chk.mu / 4.0)) {
        d = fmt("trial %d: eta %.4f, mu %.4f, K' %.4f, measured %.4f", trial,
                chk.eta, chk.mu, chk.k_prime, chk.measured);
        return false;
      }
      worst_slack = std::max(worst_slack, chk.measured - chk.k_prime);
    }
    d = fmt("100 bumps, measured - K' at most %.2e <= 1e-3", worst_slack);
    return worst_slack <= 1e-3;
  });
}

// 5. regularity exponent calibration on known shapes
void c5() {
  run_criterion({5, "regularity exponent calibration", 30.0},
                [](std::string& d) {
    SampledCurve circ = fixtures::circle(4096);
    RegularityProbe pc = holder_exponent(circ, 4.0 / 4096, 0.125);
    SampledCurve koch = fixtures::koch_snowflake(6);
    double min_sep = 4.0 / static_cast<double>(koch.size());
    RegularityProbe pk = holder_exponent(koch, min_sep, 0.125);
    double brute = oracles::brute_holder(koch, min_sep, 0.125);
    d = fmt("circle alpha %.4f in [0.95,1.05]; koch alpha %.4f vs brute "
            "%.4f (|diff| %.2e < 0.05)",
            pc.alpha, pk.alpha, brute, std::abs(pk.alpha - brute));
    return pc.alpha >= 0.95 && pc.alpha <= 1.05 &&
           std::abs(pk.alpha - brute) < 0.05;
  });
}

// 6. ellipse family flattens toward the circle in Hausdorff distance
void c6() {
  run_criterion({6, "ellipse family converges to the circle", 10.0},
                [](std::string& d) {
    SampledCurve circ = fixtures::circle(512);
    double prev = 1e9;
    std::string seq;
    for (int n : {2, 4, 8, 16, 32}) {
      SampledCurve e = fixtures::ellipse(1.0 + 1.0 / n, 1.0, 512);
      double h = hausdorff_distance(e, circ);
      seq += fmt("%.4f ", h);
      if (!(h < prev)) {
        d = "distance failed to decrease: " + seq;
        return false;
      }
      prev = h;
    }
    d = "hausdorff strictly decreasing: " + seq;
    return true;
  });
}

// 7. deeper perturbing entries depress the radius estimate monotonically
void c7() {
  run_criterion({7, "radius depression monotonicity", 120.0},
                [](std::string& d) {
    // fixture recorded from the first run of this binary (N=2000, planner
    // precision); re-asserted on every run since
    const double expected[3] = {0.30944672524830696, 0.24686978806570095,
                                0.18633389428895084};
    RotationNumber g = RotationNumber::golden(256);
    double got[3];
    int i = 0;
    for (std::uint64_t A : {10ull, 100ull, 1000ull}) {
      got[i++] = linearize(bounded_type_approximant(g, 5, A), 2000, {})
                     .radius_estimate;
    }
    bool dec = got[0] > got[1] && got[1] > got[2];
    bool pinned = true;
    for (int k = 0; k < 3; ++k) {
      pinned = pinned && std::abs(got[k] - expected[k]) <
                             1e-9 * std::abs(expected[k]);
    }
    d = fmt("A=10/100/1000 -> %.17g / %.17g / %.17g (decreasing %s, fixture "
            "%s)",
            got[0], got[1], got[2], dec ? "yes" : "NO",
            pinned ? "match" : "MISMATCH");
    return dec && pinned;
  });
}

// 8. found perturbation rounds satisfy the five numeric conclusions; budget
// exhaustion is an informational exit, never a fabricated success
void c8() {
  run_criterion({8, "perturbation trace contract", 180.0},
                [](std::string& d) {
    ExperimentConfig cfg;
    cfg.theta_spec = "golden";
    cfg.series_N = 2000;
    cfg.samples_M = 512;
    cfg.pinch_threshold = 1.3;  // the K of the search
    cfg.pinch_margin = 0.1;
    cfg.epsilon = 0.25;
    cfg.cut_lo = 5;
    cfg.cut_hi = 5;
    cfg.tail_entries = {100, 1000};
    ExperimentTrace tr = run_perturbation(cfg);
    if (tr.found_count < 1) {
      d = "attainable configuration found nothing";
      return false;
    }
    for (const ExperimentRound& r : tr.rounds) {
      if (r.status != "found") continue;
      double r1 = cfg.r1_frac * r.radius_estimate;
      double r2 = cfg.r2_frac * r.radius_estimate;
      bool drift_ok = r.theta_drift < cfg.epsilon;
      bool window_ok = r1 < r.r_star && r.r_star < r2 * (1.0 + 1e-12);
      bool inside_ok = r.r_star < r.radius_estimate;
      bool sup_ok = r.hausdorff_to_base >= 0.0 &&
                    r.hausdorff_to_base < cfg.epsilon;
      bool pinch_ok = r.constant > cfg.pinch_threshold;
      if (!(drift_ok && window_ok && inside_ok && sup_ok && pinch_ok)) {
        d = fmt("round cut=%d tail=%llu violates a conclusion "
                "(drift %d window %d inside %d sup %d pinch %d)",
                r.cut, static_cast<unsigned long long>(r.tail_entry),
                drift_ok, window_ok, inside_ok, sup_ok, pinch_ok);
        return false;
      }
    }

    // trace reproducibility through the CLI and its manifest
    fs::create_directories("acc_tmp");
    std::ofstream("acc_tmp/c8.json") << cfg.to_json().dump() << "\n";
    Cmd first = cli("experiment --config acc_tmp/c8.json --out acc_tmp/c8.jsonl");
    if (first.code != 0) {
      d = fmt("cli experiment exited %d", first.code);
      return false;
    }
    std::string trace = slurp("acc_tmp/c8.jsonl");
    Cmd again = cli("rerun --manifest acc_tmp/c8.jsonl.manifest.json");
    if (again.code != 0 || slurp("acc_tmp/c8.jsonl") != trace) {
      d = "trace is not bit-reproducible from its manifest";
      return false;
    }

    // unreachable target: informational exit, no false positive
    Cmd miss = cli(
        "experiment --config acc_tmp/c8.json --threshold 40 --margin 1 "
        "--out acc_tmp/c8_miss.jsonl");
    std::string mtrace = slurp("acc_tmp/c8_miss.jsonl");
    bool miss_ok = miss.code == 5 &&
                   mtrace.find("\"target_unreachable\":true") !=
                       std::string::npos &&
                   mtrace.find("\"status\":\"found\"") == std::string::npos;
    if (!miss_ok) {
      d = fmt("budget-exhausted run: exit %d (want 5), honest=%d", miss.code,
              static_cast<int>(miss_ok));
      return false;
    }
    d = fmt("%d found round(s) satisfy all five conclusions; trace "
            "bit-reproducible; exhausted run exits 5",
            tr.found_count);
    return true;
  });
}

// 9. every subcommand reproduces its outputs byte-for-byte from the manifest
void c9() {
  run_criterion({9, "manifest determinism across subcommands", 120.0},
                [](std::string& d) {
    fs::create_directories("acc_tmp");
    struct Step {
      const char* label;
      std::string make;
      std::string manifest;
      std::vector<std::string> outputs;
      int expect;
    };
    std::vector<Step> steps = {
        {"radius",
         "radius --theta golden --N 500 --out acc_tmp/r.json --series-out "
         "acc_tmp/r_series.json",
         "acc_tmp/r.json.manifest.json",
         {"acc_tmp/r.json", "acc_tmp/r_series.json"},
         0},
        {"boundary",
         "boundary --theta golden --N 500 --M 200 --r-frac 0.7 --out "
         "acc_tmp/b.csv",
         "acc_tmp/b.csv.manifest.json",
         {"acc_tmp/b.csv"},
         0},
        {"pinch-profile",
         "pinch-profile --curve acc_tmp/b.csv --out acc_tmp/p.csv",
         "acc_tmp/p.csv.manifest.json",
         {"acc_tmp/p.csv"},
         0},
        {"experiment",
         "experiment --theta golden --N 300 --M 64 --threshold 30 --margin 1 "
         "--cut-lo 4 --cut-hi 4 --tails 20 --grid-ratio 1.05 --out "
         "acc_tmp/e.jsonl",
         "acc_tmp/e.jsonl.manifest.json",
         {"acc_tmp/e.jsonl"},
         5},
    };
    for (const Step& s : steps) {
      Cmd made = cli(s.make);
      if (made.code != s.expect) {
        d = fmt("%s exited %d (want %d)", s.label, made.code, s.expect);
        return false;
      }
      std::vector<std::string> before;
      for (const std::string& o : s.outputs) before.push_back(slurp(o));
      for (const std::string& o : s.outputs) fs::remove(o);
      Cmd redo = cli("rerun --manifest " + s.manifest);
      if (redo.code != s.expect ||
          redo.out.find("DIFFERS") != std::string::npos) {
        d = fmt("%s rerun exited %d or diverged", s.label, redo.code);
        return false;
      }
      for (std::size_t k = 0; k < s.outputs.size(); ++k) {
        if (slurp(s.outputs[k]) != before[k]) {
          d = s.outputs[k] + " changed across rerun";
          return false;
        }
      }
    }
    d = "radius, boundary, pinch-profile, experiment all reproduce";
    return true;
  });
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  c1();
  c2();
  c3();
  c4();
  c5();
  c6();
  c7();
  c8();
  c9();
  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
