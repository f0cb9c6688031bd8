#include "siegel/curve.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "siegel/errors.hpp"

namespace siegel {

namespace {

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok, const std::string& context) {
  const char* s = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    throw UsageError("bad number '" + tok + "' in " + context);
  }
  return v;
}

}  // namespace

SampledCurve::SampledCurve(std::vector<std::complex<double>> pts,
                           CurveSource source)
    : pts_(std::move(pts)), source_(std::move(source)) {
  const std::size_t m = pts_.size();
  if (m < 16) {
    throw UsageError("a sampled curve needs at least 16 points, got " +
                     std::to_string(m));
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!std::isfinite(pts_[k].real()) || !std::isfinite(pts_[k].imag())) {
      throw UsageError("non-finite sample at index " + std::to_string(k));
    }
    if (pts_[k] == pts_[(k + 1) % m]) {
      throw CoincidentPoints("samples " + std::to_string(k) + " and " +
                             std::to_string((k + 1) % m) + " coincide");
    }
  }
  xs_.resize(2 * m);
  ys_.resize(2 * m);
  for (std::size_t k = 0; k < m; ++k) {
    xs_[k] = xs_[k + m] = pts_[k].real();
    ys_[k] = ys_[k + m] = pts_[k].imag();
  }
}

void SampledCurve::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << "# theta: " << (source_.theta_spec.empty() ? "?" : source_.theta_spec)
      << "\n";
  out << "# radius: " << hex_double(source_.radius) << "\n";
  out << "# series_length: " << source_.series_length << "\n";
  out << "# precision_bits: " << source_.precision_bits << "\n";
  out << "k,t,re,im\n";
  char buf[256];
  for (std::size_t k = 0; k < pts_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%a,%a,%a\n", k, param(k),
                  pts_[k].real(), pts_[k].imag());
    out << buf;
  }
  if (!out) throw UsageError("write to '" + path + "' failed");
}

SampledCurve SampledCurve::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open curve file '" + path + "'");
  CurveSource src;
  std::vector<std::complex<double>> pts;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string val = line.substr(colon + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      key.erase(key.find_last_not_of(" \t") + 1);
      val.erase(0, val.find_first_not_of(" \t"));
      val.erase(val.find_last_not_of(" \t") + 1);
      if (key == "theta") {
        src.theta_spec = val;
      } else if (key == "radius") {
        src.radius = parse_double(val, "curve metadata");
      } else if (key == "series_length") {
        src.series_length = static_cast<int>(
            parse_double(val, "curve metadata"));
      } else if (key == "precision_bits") {
        src.precision_bits = static_cast<long>(
            parse_double(val, "curve metadata"));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "k,t,re,im") {
        throw UsageError("curve file '" + path +
                         "' has an unexpected header: '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (cols.size() != 4) {
      throw UsageError("curve row with " + std::to_string(cols.size()) +
                       " columns in '" + path + "'");
    }
    std::size_t k = static_cast<std::size_t>(
        parse_double(cols[0], "curve row index"));
    if (k != pts.size()) {
      throw UsageError("curve rows out of order at index " +
                       std::to_string(pts.size()));
    }
    double re = parse_double(cols[2], "curve row");
    double im = parse_double(cols[3], "curve row");
    pts.emplace_back(re, im);
  }
  if (pts.empty()) {
    throw UsageError("curve file '" + path + "' contains no samples");
  }
  return SampledCurve(std::move(pts), std::move(src));
}

}  // namespace siegel
