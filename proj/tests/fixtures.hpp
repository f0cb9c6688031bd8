#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "siegel/curve.hpp"

namespace fixtures {

inline constexpr double kTau = 6.283185307179586476925286766559;

inline siegel::SampledCurve circle(int M, double r = 1.0,
                                   std::complex<double> center = {0.0, 0.0}) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double u = kTau * k / M;
    pts.emplace_back(center.real() + r * std::cos(u),
                     center.imag() + r * std::sin(u));
  }
  return siegel::SampledCurve(std::move(pts), {"fixture:circle", r, 0, 0});
}

inline siegel::SampledCurve ellipse(double a, double b, int M) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double u = kTau * k / M;
    pts.emplace_back(a * std::cos(u), b * std::sin(u));
  }
  return siegel::SampledCurve(std::move(pts), {"fixture:ellipse", 0, 0, 0});
}

// Two lobes joined by a neck of half-width `neck` at x = 0; the smooth
// analog of a curve about to self-touch.
inline siegel::SampledCurve dumbbell(int M, double neck) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double u = kTau * k / M;
    double c = std::cos(u), s = std::sin(u);
    pts.emplace_back(2.0 * c, s * (neck + (1.0 - neck) * c * c));
  }
  return siegel::SampledCurve(std::move(pts), {"fixture:dumbbell", 0, 0, 0});
}

// Koch snowflake as its depth-d vertex polyline. Every segment at depth d has
// the same length, so the vertices are equally spaced in arc length and the
// vertex sequence itself is an arc-length-uniform sampling (3 * 4^d points).
inline siegel::SampledCurve koch_snowflake(int depth) {
  using C = std::complex<double>;
  std::vector<C> v = {C(0.0, 1.0),
                      C(-std::sqrt(3.0) / 2.0, -0.5),
                      C(std::sqrt(3.0) / 2.0, -0.5)};
  for (int d = 0; d < depth; ++d) {
    std::vector<C> next;
    next.reserve(v.size() * 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
      C a = v[i], b = v[(i + 1) % v.size()];
      C e = b - a;
      next.push_back(a);
      next.push_back(a + e / 3.0);
      // outward apex for a counterclockwise polygon
      next.push_back(a + e * 0.5 - C(0.0, 1.0) * e * (std::sqrt(3.0) / 6.0));
      next.push_back(a + e * (2.0 / 3.0));
    }
    v = std::move(next);
  }
  return siegel::SampledCurve(std::move(v), {"fixture:koch", 0, depth, 0});
}

// Unit circle with a few seeded low-order Fourier modes, amplitude `amp`.
inline siegel::SampledCurve fourier_wiggle(int M, unsigned seed, double amp) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double a[5], b[5];
  for (int m = 0; m < 5; ++m) {
    a[m] = uni(rng);
    b[m] = uni(rng);
  }
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double t = static_cast<double>(k) / M;
    double rho = 1.0;
    for (int m = 0; m < 5; ++m) {
      rho += amp * (a[m] * std::cos(kTau * (m + 2) * t) +
                    b[m] * std::sin(kTau * (m + 2) * t));
    }
    pts.emplace_back(rho * std::cos(kTau * t), rho * std::sin(kTau * t));
  }
  return siegel::SampledCurve(std::move(pts), {"fixture:wiggle", 0, 0, 0});
}

// Single smooth radial bump: (1 + eta cos(2 pi k t + phase)) e^{2 pi i t}.
inline siegel::SampledCurve radial_bump(int M, double eta, int k_mode,
                                        double phase) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    double t = static_cast<double>(k) / M;
    double rho = 1.0 + eta * std::cos(kTau * k_mode * t + phase);
    pts.emplace_back(rho * std::cos(kTau * t), rho * std::sin(kTau * t));
  }
  return siegel::SampledCurve(std::move(pts), {"fixture:bump", 0, 0, 0});
}

}  // namespace fixtures
