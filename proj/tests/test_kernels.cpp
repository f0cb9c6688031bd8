#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "siegel/kernels.hpp"

using namespace siegel::kernels;

namespace {

struct Arrays {
  std::vector<double> ax, ay, bx, by;
};

Arrays random_arrays(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  Arrays r;
  for (std::size_t k = 0; k < n; ++k) {
    r.ax.push_back(uni(rng));
    r.ay.push_back(uni(rng));
    r.bx.push_back(uni(rng));
    r.by.push_back(uni(rng));
  }
  return r;
}

}  // namespace

TEST_CASE("scalar distance kernels match brute-force loops") {
  Arrays a = random_arrays(257, 11);
  const Backend& s = scalar_backend();

  double mx = 0.0, mn = 1.0 / 0.0;
  for (std::size_t k = 0; k < 257; ++k) {
    double dx = a.ax[k] - 0.25, dy = a.ay[k] + 0.5;
    double d = dx * dx + dy * dy;
    mx = std::max(mx, d);
    mn = std::min(mn, d);
  }
  CHECK(s.max_dist2_from_point(0.25, -0.5, a.ax.data(), a.ay.data(), 257) ==
        mx);
  CHECK(s.min_dist2_from_point(0.25, -0.5, a.ax.data(), a.ay.data(), 257) ==
        mn);

  double px = 0.0, pn = 1.0 / 0.0;
  for (std::size_t k = 0; k < 257; ++k) {
    double dx = a.ax[k] - a.bx[k], dy = a.ay[k] - a.by[k];
    double d = dx * dx + dy * dy;
    px = std::max(px, d);
    pn = std::min(pn, d);
  }
  CHECK(s.max_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                         257) == px);
  CHECK(s.min_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                         257) == pn);
}

TEST_CASE("scalar poly_eval matches a std::complex Horner reference") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<std::complex<double>> coeffs;
  std::vector<double> cre, cim;
  for (int j = 0; j < 37; ++j) {
    coeffs.emplace_back(uni(rng), uni(rng));
    cre.push_back(coeffs.back().real());
    cim.push_back(coeffs.back().imag());
  }
  std::vector<double> wre, wim, outre(64), outim(64);
  for (int k = 0; k < 64; ++k) {
    double u = 6.283185307179586 * k / 64;
    wre.push_back(0.8 * std::cos(u));
    wim.push_back(0.8 * std::sin(u));
  }
  scalar_backend().poly_eval(cre.data(), cim.data(), cre.size(), wre.data(),
                             wim.data(), 64, outre.data(), outim.data());
  for (int k = 0; k < 64; ++k) {
    std::complex<double> ref =
        oracles::ref_poly_eval(coeffs, {wre[k], wim[k]});
    CHECK(outre[k] == doctest::Approx(ref.real()).epsilon(1e-14));
    CHECK(outim[k] == doctest::Approx(ref.imag()).epsilon(1e-14));
  }
}

TEST_CASE("poly_eval with zero coefficients returns zero") {
  double wre = 0.5, wim = 0.25, outre = 9.0, outim = 9.0;
  scalar_backend().poly_eval(nullptr, nullptr, 0, &wre, &wim, 1, &outre,
                             &outim);
  CHECK(outre == 0.0);
  CHECK(outim == 0.0);
}

TEST_CASE("avx2 backend is bit-identical to scalar") {
  if (!avx2_supported()) {
    MESSAGE("no AVX2 on this host; nothing to compare");
    return;
  }
  const Backend& v = avx2_backend();
  const Backend& s = scalar_backend();
  // sizes straddling the lane width, including ragged tails
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 63u, 64u, 65u, 255u,
                        1021u}) {
    Arrays a = random_arrays(n, static_cast<unsigned>(1000 + n));
    CHECK(v.max_dist2_from_point(0.1, -0.7, a.ax.data(), a.ay.data(), n) ==
          s.max_dist2_from_point(0.1, -0.7, a.ax.data(), a.ay.data(), n));
    CHECK(v.min_dist2_from_point(0.1, -0.7, a.ax.data(), a.ay.data(), n) ==
          s.min_dist2_from_point(0.1, -0.7, a.ax.data(), a.ay.data(), n));
    CHECK(v.max_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                           n) ==
          s.max_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                           n));
    CHECK(v.min_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                           n) ==
          s.min_pair_dist2(a.ax.data(), a.ay.data(), a.bx.data(), a.by.data(),
                           n));

    std::vector<double> outre_s(n), outim_s(n), outre_v(n), outim_v(n);
    std::size_t nc = std::min<std::size_t>(n, 40);
    s.poly_eval(a.bx.data(), a.by.data(), nc, a.ax.data(), a.ay.data(), n,
                outre_s.data(), outim_s.data());
    v.poly_eval(a.bx.data(), a.by.data(), nc, a.ax.data(), a.ay.data(), n,
                outre_v.data(), outim_v.data());
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(outre_v[k] == outre_s[k]);
      CHECK(outim_v[k] == outim_s[k]);
    }
  }
}

TEST_CASE("set_active swaps the dispatch target") {
  const Backend& before = active();
  set_active(scalar_backend());
  CHECK(std::string(active().name) == "scalar");
  set_active(before);
}
