#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace siegel {

// Provenance of a sampled curve, carried through files so downstream reports
// can name their inputs. Synthetic curves use a descriptive tag in theta_spec
// and leave the numeric fields at zero.
struct CurveSource {
  std::string theta_spec;
  double radius = 0.0;
  int series_length = 0;
  long precision_bits = 0;
};

// Closed curve sampled at M uniformly spaced parameters t_k = k/M, M >= 16.
// Points are stored both as complex values and as split re/im buffers of
// length 2M (second half repeats the first) so any wrapped arc is contiguous.
// Consecutive samples, including the wrap pair, must be distinct.
class SampledCurve {
 public:
  SampledCurve(std::vector<std::complex<double>> pts, CurveSource source);

  std::size_t size() const { return pts_.size(); }
  double param(std::size_t k) const {
    return static_cast<double>(k) / static_cast<double>(pts_.size());
  }
  const std::complex<double>& operator[](std::size_t k) const { return pts_[k]; }
  const std::vector<std::complex<double>>& points() const { return pts_; }
  const CurveSource& source() const { return source_; }

  // Split buffers of length 2*size(): xs()[k + size()] == xs()[k].
  const double* xs() const { return xs_.data(); }
  const double* ys() const { return ys_.data(); }

  // CSV with '#'-prefixed metadata, a "k,t,re,im" header, and one row per
  // sample; floats are written as hex so read_csv(write_csv(c)) reproduces
  // the curve bit for bit.
  void write_csv(const std::string& path) const;
  static SampledCurve read_csv(const std::string& path);

 private:
  std::vector<std::complex<double>> pts_;
  std::vector<double> xs_, ys_;
  CurveSource source_;
};

}  // namespace siegel
