#pragma once

#include <cstddef>

namespace siegel::kernels {

// Hot loops over split real/imaginary (structure-of-arrays) buffers. Every
// backend must produce bit-identical results to the scalar reference: the
// arithmetic per element is fixed (dx*dx + dy*dy, no fused contractions) and
// min/max reductions are order-insensitive.

// max over k < n of (xs[k]-px)^2 + (ys[k]-py)^2
using PointDist2Fn = double (*)(double px, double py, const double* xs,
                                const double* ys, std::size_t n);
// max/min over k < n of (ax[k]-bx[k])^2 + (ay[k]-by[k])^2
using PairDist2Fn = double (*)(const double* ax, const double* ay,
                               const double* bx, const double* by,
                               std::size_t n);
// out[k] = sum_{j=1}^{nc} c_j w_k^j for k < np, evaluated by Horner as
// w*(c_1 + w*(c_2 + ... + w*c_nc)). Coefficients are 0-indexed: cre[j-1].
using PolyEvalFn = void (*)(const double* cre, const double* cim,
                            std::size_t nc, const double* wre,
                            const double* wim, std::size_t np, double* outre,
                            double* outim);

struct Backend {
  const char* name;
  PointDist2Fn max_dist2_from_point;
  PointDist2Fn min_dist2_from_point;
  PairDist2Fn max_pair_dist2;
  PairDist2Fn min_pair_dist2;
  PolyEvalFn poly_eval;
};

const Backend& scalar_backend();
bool avx2_supported();
const Backend& avx2_backend();  // valid only when avx2_supported()

// Runtime-selected backend: AVX2 when the CPU supports it, scalar otherwise.
// SIEGLAB_KERNELS=scalar|avx2 overrides (requesting an unsupported backend
// throws UsageError).
const Backend& active();
void set_active(const Backend& b);  // for tests

}  // namespace siegel::kernels
