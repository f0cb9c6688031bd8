#include "siegel/curvegeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "siegel/errors.hpp"
#include "siegel/kernels.hpp"

namespace siegel {

namespace {

constexpr std::size_t kExactArcLimit = 4096;  // pairwise scan up to here
constexpr std::size_t kTableMaxM = 2048;      // all-pairs table cap

double dist2(double ax, double ay, double bx, double by) {
  double dx = ax - bx;
  double dy = ay - by;
  return dx * dx + dy * dy;
}

struct Pt {
  double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone chain; collinear points dropped. Returns >= 1 vertices, ccw.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Pt> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double hull_diam2(const std::vector<Pt>& h) {
  std::size_t n = h.size();
  if (n <= 1) return 0.0;
  if (n == 2) return dist2(h[0].x, h[0].y, h[1].x, h[1].y);
  double best = 0.0;
  std::size_t j = 1;
  std::size_t guard = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ni = (i + 1) % n;
    while (guard++ < 4 * n) {
      std::size_t nj = (j + 1) % n;
      double adv = (h[ni].x - h[i].x) * (h[nj].y - h[j].y) -
                   (h[ni].y - h[i].y) * (h[nj].x - h[j].x);
      if (adv > 0) {
        j = nj;
      } else {
        break;
      }
    }
    best = std::max(best, dist2(h[i].x, h[i].y, h[j].x, h[j].y));
    best = std::max(best, dist2(h[ni].x, h[ni].y, h[j].x, h[j].y));
  }
  return best;
}

// diam^2 of samples lo..hi inclusive, indices into the doubled buffers.
double arc_diam2(const SampledCurve& c, std::size_t lo, std::size_t hi) {
  const double* xs = c.xs();
  const double* ys = c.ys();
  std::size_t count = hi - lo + 1;
  if (count <= 1) return 0.0;
  if (count <= kExactArcLimit) {
    const kernels::Backend& k = kernels::active();
    double best = 0.0;
    for (std::size_t j = lo + 1; j <= hi; ++j) {
      double d2 = k.max_dist2_from_point(xs[j], ys[j], xs + lo, ys + lo, j - lo);
      if (d2 > best) best = d2;
    }
    return best;
  }
  std::vector<Pt> pts(count);
  for (std::size_t j = 0; j < count; ++j) pts[j] = {xs[lo + j], ys[lo + j]};
  return hull_diam2(convex_hull(std::move(pts)));
}

// Lower bound on arc_diam2 from a strided subset (endpoints included).
double arc_diam2_lower(const SampledCurve& c, std::size_t lo, std::size_t hi) {
  const double* xs = c.xs();
  const double* ys = c.ys();
  std::vector<std::size_t> idx;
  std::size_t count = hi - lo + 1;
  std::size_t stride = std::max<std::size_t>(1, count / 64);
  for (std::size_t j = lo; j < hi; j += stride) idx.push_back(j);
  idx.push_back(hi);
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      best = std::max(best, dist2(xs[idx[a]], ys[idx[a]], xs[idx[b]], ys[idx[b]]));
    }
  }
  return best;
}

void check_indices(const SampledCurve& c, std::size_t i, std::size_t j) {
  if (i >= c.size() || j >= c.size()) {
    throw UsageError("pair index out of range");
  }
  if (i == j) throw UsageError("pinching needs two distinct sample indices");
}

std::vector<std::size_t> dyadic_separations(std::size_t m) {
  std::vector<std::size_t> seps;
  for (std::size_t s = 1; s <= m / 2; s *= 2) seps.push_back(s);
  return seps;
}

struct FitResult {
  double slope = 0.0;
  double rms = 0.0;
};

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("all abscissae coincide");
  FitResult r;
  r.slope = sxy / sxx;
  double intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double e = y[k] - (r.slope * x[k] + intercept);
    ss += e * e;
  }
  r.rms = std::sqrt(ss / static_cast<double>(n));
  return r;
}

}  // namespace

double arc_diameter(const SampledCurve& c, std::size_t lo, std::size_t hi) {
  const std::size_t m = c.size();
  if (hi < lo || hi - lo >= m) {
    throw UsageError("arc range must satisfy lo <= hi < lo + size");
  }
  if (lo >= m) {
    lo -= m;
    hi -= m;
  }
  if (lo >= m) throw UsageError("arc start out of range");
  return std::sqrt(arc_diam2(c, lo, hi));
}

PinchingReport pinch(const SampledCurve& c, std::size_t i, std::size_t j) {
  check_indices(c, i, j);
  if (i > j) std::swap(i, j);
  PinchingReport r;
  r.i = i;
  r.j = j;
  double d2 = dist2(c.xs()[i], c.ys()[i], c.xs()[j], c.ys()[j]);
  if (d2 == 0.0) {
    throw CoincidentPoints("samples " + std::to_string(i) + " and " +
                           std::to_string(j) + " coincide");
  }
  r.dist = std::sqrt(d2);
  r.diam_u = std::sqrt(arc_diam2(c, i, j));
  r.diam_v = std::sqrt(arc_diam2(c, j, i + c.size()));
  r.pinch = std::min(r.diam_u, r.diam_v) / r.dist;
  return r;
}

namespace {

// Shared scan driver. `emit` sees every evaluated pair with exact distance
// and pinch; in certified mode (exact_rows=false) a row's larger diameter may
// be a lower bound when the minimum is already decided by the other arc.
template <typename Emit>
QuasicircleEstimate scan_pairs(const SampledCurve& c, std::size_t pair_budget,
                               bool exact_rows, Emit&& emit) {
  const std::size_t m = c.size();
  const double* xs = c.xs();
  const double* ys = c.ys();
  QuasicircleEstimate est;

  auto consider = [&est, &emit](const PinchingReport& r) {
    emit(r);
    ++est.pairs_evaluated;
    if (r.pinch > est.witness.pinch) est.witness = r;
  };

  const std::size_t npairs = m * (m - 1) / 2;
  if (npairs <= pair_budget && m <= kTableMaxM) {
    // full table: diam2 of every arc, indexed by (start, length)
    std::vector<double> table(m * m, 0.0);
    const kernels::Backend& kb = kernels::active();
    for (std::size_t i = 0; i < m; ++i) {
      double run = 0.0;
      for (std::size_t len = 1; len < m; ++len) {
        double d2 = kb.max_dist2_from_point(xs[i + len], ys[i + len], xs + i,
                                            ys + i, len);
        if (d2 > run) run = d2;
        table[i * m + len] = run;
      }
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double d2 = dist2(xs[i], ys[i], xs[j], ys[j]);
        if (d2 == 0.0) {
          throw CoincidentPoints("samples " + std::to_string(i) + " and " +
                                 std::to_string(j) + " coincide");
        }
        PinchingReport r;
        r.i = i;
        r.j = j;
        r.dist = std::sqrt(d2);
        r.diam_u = std::sqrt(table[i * m + (j - i)]);
        r.diam_v = std::sqrt(table[j * m + (i + m - j)]);
        r.pinch = std::min(r.diam_u, r.diam_v) / r.dist;
        consider(r);
      }
    }
    est.exact = true;
    est.constant = est.witness.pinch;
    return est;
  }

  // dyadic parameter separations
  bool witness_exact = true;
  for (std::size_t s : dyadic_separations(m)) {
    std::size_t kmax = (2 * s == m) ? m / 2 : m;
    for (std::size_t k = 0; k < kmax; ++k) {
      const std::size_t a = k, b = k + s;
      double d2 = dist2(xs[a], ys[a], xs[b], ys[b]);
      // canonical sorted pair; the short arc a..b is the u-arc iff b < m
      std::size_t ci = b >= m ? b - m : a;
      std::size_t cj = b >= m ? a : b;
      if (d2 == 0.0) {
        throw CoincidentPoints("samples " + std::to_string(ci) + " and " +
                               std::to_string(cj) + " coincide");
      }
      double short2 = arc_diam2(c, a, b);
      double long2;
      bool long_exact = true;
      if (exact_rows) {
        long2 = arc_diam2(c, b, a + m);
      } else {
        long2 = arc_diam2_lower(c, b, a + m);
        if (long2 < short2) {
          // the lower bound cannot decide the minimum: need the long arc
          long2 = arc_diam2(c, b, a + m);
        } else {
          long_exact = false;
        }
      }
      PinchingReport r;
      r.i = ci;
      r.j = cj;
      r.dist = std::sqrt(d2);
      r.diam_u = std::sqrt(b >= m ? long2 : short2);
      r.diam_v = std::sqrt(b >= m ? short2 : long2);
      r.pinch = std::min(r.diam_u, r.diam_v) / r.dist;
      bool was_best = r.pinch > est.witness.pinch;
      consider(r);
      if (was_best) witness_exact = long_exact || exact_rows;
    }
  }
  est.exact = false;
  if (!witness_exact && est.pairs_evaluated > 0) {
    // the witness carries a lower bound in one slot; make the report exact.
    // The pinch itself is unchanged: the exact diameter only grows.
    est.witness = pinch(c, est.witness.i, est.witness.j);
  }
  est.constant = est.witness.pinch;
  return est;
}

}  // namespace

QuasicircleEstimate quasicircle_constant(const SampledCurve& c,
                                         std::size_t pair_budget) {
  return scan_pairs(c, pair_budget, false, [](const PinchingReport&) {});
}

PinchProfile pinch_profile(const SampledCurve& c, std::size_t pair_budget) {
  PinchProfile prof;
  prof.summary =
      scan_pairs(c, pair_budget, true, [&prof](const PinchingReport& r) {
        prof.rows.push_back(r);
      });
  return prof;
}

void write_pinch_csv(const PinchProfile& p, const SampledCurve& c,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  char buf[320];
  std::snprintf(buf, sizeof buf, "# constant: %a\n", p.summary.constant);
  out << buf;
  out << "# exact: " << (p.summary.exact ? 1 : 0) << "\n";
  out << "# pairs: " << p.summary.pairs_evaluated << "\n";
  out << "# witness: " << p.summary.witness.i << " " << p.summary.witness.j
      << "\n";
  out << "i,j,t_i,t_j,dist,diam_u,diam_v,pinch\n";
  for (const PinchingReport& r : p.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%a,%a,%a,%a,%a,%a\n", r.i, r.j,
                  c.param(r.i), c.param(r.j), r.dist, r.diam_u, r.diam_v,
                  r.pinch);
    out << buf;
  }
  if (!out) throw UsageError("write to '" + path + "' failed");
}

double hausdorff_distance(const SampledCurve& a, const SampledCurve& b) {
  const kernels::Backend& k = kernels::active();
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d2 = k.min_dist2_from_point(a.xs()[i], a.ys()[i], b.xs(), b.ys(),
                                       b.size());
    if (d2 > best) best = d2;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    double d2 = k.min_dist2_from_point(b.xs()[i], b.ys()[i], a.xs(), a.ys(),
                                       a.size());
    if (d2 > best) best = d2;
  }
  return std::sqrt(best);
}

double sup_norm_distance(const SampledCurve& a, const SampledCurve& b) {
  if (a.size() != b.size()) {
    throw GridMismatch("curves have " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + " samples");
  }
  double d2 = kernels::active().max_pair_dist2(a.xs(), a.ys(), b.xs(), b.ys(),
                                               a.size());
  return std::sqrt(d2);
}

RegularityProbe holder_exponent(const SampledCurve& c, double min_sep,
                                double max_sep) {
  if (!(min_sep > 0.0) || !(max_sep > min_sep) || max_sep > 0.5) {
    throw UsageError("separations must satisfy 0 < min_sep < max_sep <= 0.5");
  }
  const std::size_t m = c.size();
  std::vector<double> lx, ly;
  const kernels::Backend& k = kernels::active();
  for (std::size_t s : dyadic_separations(m)) {
    double sep = static_cast<double>(s) / static_cast<double>(m);
    if (sep < min_sep || sep > max_sep) continue;
    double d2 = k.max_pair_dist2(c.xs(), c.ys(), c.xs() + s, c.ys() + s, m);
    if (d2 == 0.0) {
      throw DegenerateFit("zero displacement at separation " +
                          std::to_string(sep));
    }
    lx.push_back(std::log(sep));
    ly.push_back(0.5 * std::log(d2));
  }
  if (lx.size() < 4) {
    throw InsufficientScales("regularity fit needs >= 4 dyadic scales in [" +
                             std::to_string(min_sep) + ", " +
                             std::to_string(max_sep) + "], found " +
                             std::to_string(lx.size()));
  }
  FitResult fit = fit_line(lx, ly);
  RegularityProbe probe;
  probe.alpha = fit.slope;
  probe.fit_residual = fit.rms;
  probe.scales_used = lx.size();
  probe.low_quality = fit.rms > 0.25;
  return probe;
}

StabilityCheck c1_stability(const SampledCurve& f, const SampledCurve& g,
                            double k_base, std::size_t pair_budget) {
  StabilityCheck chk;
  chk.eta = sup_norm_distance(f, g);
  const std::size_t m = f.size();
  const kernels::Backend& k = kernels::active();

  // min sample distance at each parameter separation, then suffix-min so
  // mu_from[s] = min over separations >= s
  std::vector<double> mu_from(m / 2 + 1, 0.0);
  for (std::size_t s = 1; s <= m / 2; ++s) {
    mu_from[s] = std::sqrt(
        k.min_pair_dist2(f.xs(), f.ys(), f.xs() + s, f.ys() + s, m));
  }
  for (std::size_t s = m / 2; s-- > 1;) {
    mu_from[s] = std::min(mu_from[s], mu_from[s + 1]);
  }

  chk.measured = quasicircle_constant(g, pair_budget).constant;
  std::size_t s_eps = 0;
  for (std::size_t s = 1; s <= m / 2; ++s) {
    if (mu_from[s] >= 8.0 * chk.eta) {
      s_eps = s;
      break;
    }
  }
  if (s_eps == 0) {
    chk.k_prime = std::numeric_limits<double>::infinity();
    chk.holds = false;
    return chk;
  }
  chk.epsilon = static_cast<double>(s_eps) / static_cast<double>(m);
  chk.mu = mu_from[s_eps];
  chk.k_prime =
      k_base * (chk.mu + 2.0 * chk.eta) / (chk.mu - 2.0 * chk.eta);
  chk.holds = chk.measured <= chk.k_prime;
  return chk;
}

}  // namespace siegel
