#include "siegel/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "siegel/errors.hpp"

namespace siegel::kernels {

namespace {

double s_max_dist2_from_point(double px, double py, const double* xs,
                              const double* ys, std::size_t n) {
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = xs[k] - px;
    double dy = ys[k] - py;
    double d = dx * dx + dy * dy;
    if (d > best) best = d;
  }
  return best;
}

double s_min_dist2_from_point(double px, double py, const double* xs,
                              const double* ys, std::size_t n) {
  double best = 1.0 / 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = xs[k] - px;
    double dy = ys[k] - py;
    double d = dx * dx + dy * dy;
    if (d < best) best = d;
  }
  return best;
}

double s_max_pair_dist2(const double* ax, const double* ay, const double* bx,
                        const double* by, std::size_t n) {
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = ax[k] - bx[k];
    double dy = ay[k] - by[k];
    double d = dx * dx + dy * dy;
    if (d > best) best = d;
  }
  return best;
}

double s_min_pair_dist2(const double* ax, const double* ay, const double* bx,
                        const double* by, std::size_t n) {
  double best = 1.0 / 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = ax[k] - bx[k];
    double dy = ay[k] - by[k];
    double d = dx * dx + dy * dy;
    if (d < best) best = d;
  }
  return best;
}

void s_poly_eval(const double* cre, const double* cim, std::size_t nc,
                 const double* wre, const double* wim, std::size_t np,
                 double* outre, double* outim) {
  for (std::size_t k = 0; k < np; ++k) {
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

const Backend kScalar = {
    "scalar",           s_max_dist2_from_point, s_min_dist2_from_point,
    s_max_pair_dist2,   s_min_pair_dist2,       s_poly_eval,
};

std::atomic<const Backend*> g_active{nullptr};

const Backend& select_default() {
  const char* env = std::getenv("SIEGLAB_KERNELS");
  if (env != nullptr && *env != '\0') {
    if (std::strcmp(env, "scalar") == 0) return scalar_backend();
    if (std::strcmp(env, "avx2") == 0) {
      if (!avx2_supported()) {
        throw UsageError("SIEGLAB_KERNELS=avx2 but the CPU lacks AVX2");
      }
      return avx2_backend();
    }
    throw UsageError(std::string("unknown SIEGLAB_KERNELS value '") + env +
                     "' (expected scalar or avx2)");
  }
  return avx2_supported() ? avx2_backend() : scalar_backend();
}

}  // namespace

const Backend& scalar_backend() { return kScalar; }

#if defined(__x86_64__) || defined(__i386__)
bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }
#else
bool avx2_supported() { return false; }
const Backend& avx2_backend() {
  throw UsageError("AVX2 backend is not built on this architecture");
}
#endif

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (b == nullptr) {
    b = &select_default();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void set_active(const Backend& b) {
  g_active.store(&b, std::memory_order_release);
}

}  // namespace siegel::kernels
