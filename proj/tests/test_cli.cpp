#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef SIEGLAB_BIN
#error "SIEGLAB_BIN must point at the CLI executable"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + std::string(SIEGLAB_BIN) + " " + args +
                    " 2>stderr.txt";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

std::string stderr_text() {
  std::ifstream f("stderr.txt");
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path prev;
  explicit TempDir(const char* name) {
    prev = fs::current_path();
    fs::path d = prev / name;
    fs::remove_all(d);
    fs::create_directories(d);
    fs::current_path(d);
  }
  ~TempDir() {
    fs::path d = fs::current_path();
    fs::current_path(prev);
    fs::remove_all(d);
  }
};

}  // namespace

TEST_CASE("cli: version and help") {
  CHECK(run("--version").code == 0);
  CHECK(run("--help").code == 0);
  CHECK(run("radius --help").code == 0);
}

TEST_CASE("cli: radius output is deterministic") {
  TempDir td("cli_tmp_radius");
  RunResult a = run("radius --theta golden --N 300 --out a.json");
  RunResult b = run("radius --theta golden --N 300 --out b.json");
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("radius_estimate") != std::string::npos);
  CHECK(slurp("a.json") == slurp("b.json"));
  CHECK(fs::exists("a.json.manifest.json"));
}

TEST_CASE("cli: error classes map to exit codes") {
  TempDir td("cli_tmp_errors");

  RunResult rational = run("radius --theta 1/3 --N 100");
  CHECK(rational.code == 4);
  CHECK(stderr_text().find("RationalAngle") != std::string::npos);

  CHECK(run("radius --N 100").code == 2);            // missing --theta
  CHECK(run("radius --theta nonsense").code == 2);   // unparsable spec
  CHECK(run("frobnicate").code == 2);                // unknown subcommand

  {
    std::ofstream f("empty.csv");
  }
  RunResult empty = run("pinch-profile --curve empty.csv --out p.csv");
  CHECK(empty.code == 2);

  // forcing a precision too small for the depth -> precision error class
  RunResult prec = run(
      "radius --theta golden --N 1000 --precision-bits 64");
  CHECK(prec.code == 3);
  CHECK(stderr_text().find("PrecisionExhausted") != std::string::npos);
}

TEST_CASE("cli: boundary -> pinch-profile pipeline with manifests") {
  TempDir td("cli_tmp_pipeline");
  RunResult b = run(
      "boundary --theta golden --N 300 --M 128 --r-frac 0.6 --out c.csv");
  CHECK(b.code == 0);
  REQUIRE(fs::exists("c.csv"));
  REQUIRE(fs::exists("c.csv.manifest.json"));

  RunResult p = run("pinch-profile --curve c.csv --out pinch.csv");
  CHECK(p.code == 0);
  CHECK(p.out.find("max pinch") != std::string::npos);
  REQUIRE(fs::exists("pinch.csv.manifest.json"));

  // rerun both manifests: outputs must reproduce byte for byte
  std::string c_bytes = slurp("c.csv");
  std::string pinch_bytes = slurp("pinch.csv");
  fs::remove("c.csv");
  RunResult rb = run("rerun --manifest c.csv.manifest.json");
  CHECK(rb.code == 0);
  CHECK(rb.out.find("reproduced byte-for-byte") != std::string::npos);
  CHECK(slurp("c.csv") == c_bytes);

  RunResult rp = run("rerun --manifest pinch.csv.manifest.json");
  CHECK(rp.code == 0);
  CHECK(slurp("pinch.csv") == pinch_bytes);
}

TEST_CASE("cli: rerun rejects foreign manifests") {
  TempDir td("cli_tmp_badmanifest");
  {
    std::ofstream f("fake.manifest.json");
    f << "{\"tool\":\"other\",\"version\":\"1\",\"subcommand\":\"radius\","
         "\"resolved\":{},\"inputs\":[],\"outputs\":[],"
         "\"duration_seconds\":0}\n";
  }
  CHECK(run("rerun --manifest fake.manifest.json").code == 2);
  CHECK(run("rerun --manifest does_not_exist.json").code == 2);
}

TEST_CASE("cli: experiment exit codes and trace reruns") {
  TempDir td("cli_tmp_experiment");

  // unreachable target: informational exit code 5, artifacts still written
  RunResult miss = run(
      "experiment --N 150 --M 64 --threshold 40 --margin 1 --cut-lo 4 "
      "--cut-hi 4 --tails 30 --grid-ratio 1.05 --out miss.jsonl");
  CHECK(miss.code == 5);
  CHECK(miss.out.find("target unreachable") != std::string::npos);
  REQUIRE(fs::exists("miss.jsonl"));
  CHECK(slurp("miss.jsonl").find("\"target_unreachable\":true") !=
        std::string::npos);
  REQUIRE(fs::exists("miss.jsonl.manifest.json"));

  // reachable target: exit 0 and a bit-reproducible trace
  RunResult hit = run(
      "experiment --N 150 --M 64 --threshold 1.05 --margin 0.05 --cut-lo 4 "
      "--cut-hi 5 --tails 50 --grid-ratio 1.01 --out hit.jsonl");
  CHECK(hit.code == 0);
  std::string trace = slurp("hit.jsonl");
  CHECK(trace.find("\"status\":\"found\"") != std::string::npos);

  RunResult rr = run("rerun --manifest hit.jsonl.manifest.json");
  CHECK(rr.code == 0);
  CHECK(slurp("hit.jsonl") == trace);

  // rerunning the unreachable run reproduces it, informational code and all
  RunResult rmiss = run("rerun --manifest miss.jsonl.manifest.json");
  CHECK(rmiss.code == 5);
  CHECK(rmiss.out.find("reproduced byte-for-byte") != std::string::npos);
}

TEST_CASE("cli: config file and flag overrides compose") {
  TempDir td("cli_tmp_config");
  RunResult pc = run(
      "experiment --N 200 --M 64 --tails 7,9 --cut-lo 3 --cut-hi 3 "
      "--print-config");
  CHECK(pc.code == 0);
  CHECK(pc.out.find("\"series_N\": 200") != std::string::npos);
  {
    std::ofstream f("cfg.json");
    f << pc.out;
  }
  // file + override: the trace must reflect the overridden field
  RunResult r = run(
      "experiment --config cfg.json --threshold 35 --margin 0 "
      "--out t.jsonl");
  CHECK(r.code == 5);
  std::string trace = slurp("t.jsonl");
  CHECK(trace.find("\"series_N\":200") != std::string::npos);
  CHECK(trace.find("\"tail_entry\":7") != std::string::npos);
  CHECK(trace.find("\"tail_entry\":9") != std::string::npos);
}

TEST_CASE("cli: environment variable sets the default precision") {
  TempDir td("cli_tmp_env");
  RunResult r = run("radius --theta golden --N 200",
                    "SIEGLAB_PRECISION_BITS=320");
  CHECK(r.code == 0);
  CHECK(r.out.find("precision_bits        320") != std::string::npos);

  // an explicit flag wins over the environment
  RunResult f = run("radius --theta golden --N 200 --precision-bits 288",
                    "SIEGLAB_PRECISION_BITS=320");
  CHECK(f.code == 0);
  CHECK(f.out.find("precision_bits        288") != std::string::npos);

  RunResult bad = run("radius --theta golden --N 200",
                      "SIEGLAB_PRECISION_BITS=abc");
  CHECK(bad.code == 2);
}

TEST_CASE("cli: kernel selection cannot change any output byte") {
  TempDir td("cli_tmp_kernels");
  RunResult info = run("kernels");
  CHECK(info.code == 0);
  bool has_avx2 = info.out.find("avx2    supported") != std::string::npos;

  RunResult s = run(
      "boundary --theta golden --N 300 --M 200 --r-frac 0.8 --out s.csv",
      "SIEGLAB_KERNELS=scalar");
  CHECK(s.code == 0);
  if (!has_avx2) {
    CHECK(run("kernels", "SIEGLAB_KERNELS=avx2").code == 2);
    return;
  }
  RunResult v = run(
      "boundary --theta golden --N 300 --M 200 --r-frac 0.8 --out v.csv",
      "SIEGLAB_KERNELS=avx2");
  CHECK(v.code == 0);
  CHECK(slurp("s.csv") == slurp("v.csv"));

  CHECK(run("pinch-profile --curve s.csv --out ps.csv",
            "SIEGLAB_KERNELS=scalar")
            .code == 0);
  CHECK(run("pinch-profile --curve v.csv --out pv.csv",
            "SIEGLAB_KERNELS=avx2")
            .code == 0);
  CHECK(slurp("ps.csv") == slurp("pv.csv"));
}
