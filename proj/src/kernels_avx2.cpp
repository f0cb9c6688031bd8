// AVX2 variants of the hot loops. Compiled with -mavx2 in its own translation
// unit; only reached through the dispatch table after a cpuid check. No FMA:
// results must match the scalar reference bit for bit.

#include <immintrin.h>

#include "siegel/kernels.hpp"

namespace siegel::kernels {

namespace {

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double a = lanes[0] > lanes[1] ? lanes[0] : lanes[1];
  double b = lanes[2] > lanes[3] ? lanes[2] : lanes[3];
  return a > b ? a : b;
}

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double a = lanes[0] < lanes[1] ? lanes[0] : lanes[1];
  double b = lanes[2] < lanes[3] ? lanes[2] : lanes[3];
  return a < b ? a : b;
}

double a_max_dist2_from_point(double px, double py, const double* xs,
                              const double* ys, std::size_t n) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  __m256d vbest = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + k), vpx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + k), vpy);
    __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_max_pd(vbest, d);
  }
  double best = hmax(vbest);
  for (; k < n; ++k) {
    double dx = xs[k] - px;
    double dy = ys[k] - py;
    double d = dx * dx + dy * dy;
    if (d > best) best = d;
  }
  return best;
}

double a_min_dist2_from_point(double px, double py, const double* xs,
                              const double* ys, std::size_t n) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  __m256d vbest = _mm256_set1_pd(1.0 / 0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + k), vpx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + k), vpy);
    __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_min_pd(vbest, d);
  }
  double best = hmin(vbest);
  for (; k < n; ++k) {
    double dx = xs[k] - px;
    double dy = ys[k] - py;
    double d = dx * dx + dy * dy;
    if (d < best) best = d;
  }
  return best;
}

double a_max_pair_dist2(const double* ax, const double* ay, const double* bx,
                        const double* by, std::size_t n) {
  __m256d vbest = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + k), _mm256_loadu_pd(bx + k));
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + k), _mm256_loadu_pd(by + k));
    __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_max_pd(vbest, d);
  }
  double best = hmax(vbest);
  for (; k < n; ++k) {
    double dx = ax[k] - bx[k];
    double dy = ay[k] - by[k];
    double d = dx * dx + dy * dy;
    if (d > best) best = d;
  }
  return best;
}

double a_min_pair_dist2(const double* ax, const double* ay, const double* bx,
                        const double* by, std::size_t n) {
  __m256d vbest = _mm256_set1_pd(1.0 / 0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + k), _mm256_loadu_pd(bx + k));
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + k), _mm256_loadu_pd(by + k));
    __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_min_pd(vbest, d);
  }
  double best = hmin(vbest);
  for (; k < n; ++k) {
    double dx = ax[k] - bx[k];
    double dy = ay[k] - by[k];
    double d = dx * dx + dy * dy;
    if (d < best) best = d;
  }
  return best;
}

void a_poly_eval(const double* cre, const double* cim, std::size_t nc,
                 const double* wre, const double* wim, std::size_t np,
                 double* outre, double* outim) {
  std::size_t k = 0;
  for (; k + 4 <= np; k += 4) {
    __m256d wr = _mm256_loadu_pd(wre + k);
    __m256d wi = _mm256_loadu_pd(wim + k);
    __m256d ar = _mm256_setzero_pd();
    __m256d ai = _mm256_setzero_pd();
    if (nc > 0) {
      ar = _mm256_set1_pd(cre[nc - 1]);
      ai = _mm256_set1_pd(cim[nc - 1]);
      for (std::size_t j = nc - 1; j-- > 0;) {
        __m256d tr = _mm256_sub_pd(_mm256_mul_pd(ar, wr), _mm256_mul_pd(ai, wi));
        __m256d ti = _mm256_add_pd(_mm256_mul_pd(ar, wi), _mm256_mul_pd(ai, wr));
        ar = _mm256_add_pd(tr, _mm256_set1_pd(cre[j]));
        ai = _mm256_add_pd(ti, _mm256_set1_pd(cim[j]));
      }
    }
    _mm256_storeu_pd(outre + k,
                     _mm256_sub_pd(_mm256_mul_pd(ar, wr), _mm256_mul_pd(ai, wi)));
    _mm256_storeu_pd(outim + k,
                     _mm256_add_pd(_mm256_mul_pd(ar, wi), _mm256_mul_pd(ai, wr)));
  }
  for (; k < np; ++k) {
    double wr = wre[k], wi = wim[k];
    double ar = 0.0, ai = 0.0;
    if (nc > 0) {
      ar = cre[nc - 1];
      ai = cim[nc - 1];
      for (std::size_t j = nc - 1; j-- > 0;) {
        double tr = ar * wr - ai * wi;
        double ti = ar * wi + ai * wr;
        ar = tr + cre[j];
        ai = ti + cim[j];
      }
    }
    outre[k] = ar * wr - ai * wi;
    outim[k] = ar * wi + ai * wr;
  }
}

const Backend kAvx2 = {
    "avx2",           a_max_dist2_from_point, a_min_dist2_from_point,
    a_max_pair_dist2, a_min_pair_dist2,       a_poly_eval,
};

}  // namespace

const Backend& avx2_backend() { return kAvx2; }

}  // namespace siegel::kernels
