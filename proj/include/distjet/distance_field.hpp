#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "distjet/jets.hpp"
#include "distjet/shapes.hpp"

// Squared distance to an immersed shape and finite-difference derivative
// tensors of A = (|x|^2 - eta)/2. This is the oracle side of the house: nothing
// here knows about the symbolic recursion, so agreement with it is evidence.

namespace distjet {

struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DistanceField {
  Immersion im;
  double halfwidth;

  explicit DistanceField(Immersion immersion)
      : im(std::move(immersion)), halfwidth(im.tube) {}
};

struct Projection {
  std::vector<double> u;
  std::vector<double> foot;
  double eta = 0;
};

namespace detail {

inline double objective(const Immersion& im, const std::vector<double>& u,
                        const std::vector<double>& x) {
  std::vector<double> p = im.point(u);
  double f = 0;
  for (size_t i = 0; i < p.size(); ++i) f += (p[i] - x[i]) * (p[i] - x[i]);
  return f;
}

}  // namespace detail

// Nearest-point projection: coarse multistart (64 seeds) plus Newton on the
// stationarity system (phi(u) - x) . phi_a(u) = 0.
inline Projection project(const DistanceField& df, const std::vector<double>& x,
                          const std::vector<double>* hint = nullptr) {
  const Immersion& im = df.im;
  const int n = im.n, d = im.d();

  std::vector<std::vector<double>> seeds;
  if (hint) seeds.push_back(*hint);
  const int per_axis = n == 1 ? 64 : 8;
  const double span = im.seed_hi - im.seed_lo;
  if (n == 1) {
    for (int i = 0; i < per_axis; ++i)
      seeds.push_back({im.seed_lo + span * i / per_axis});
  } else {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        seeds.push_back({im.seed_lo + span * i / per_axis, im.seed_lo + span * j / per_axis});
  }

  // Rank seeds by objective, Newton-polish the best few.
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t i = 0; i < seeds.size(); ++i)
    ranked.push_back({detail::objective(im, seeds[i], x), i});
  std::sort(ranked.begin(), ranked.end());
  const size_t tries = hint ? 2 : std::min<size_t>(5, ranked.size());

  Projection best;
  bool converged = false;
  double best_f = 1e300;
  for (size_t t = 0; t < tries; ++t) {
    std::vector<double> u = seeds[ranked[t].second];
    bool ok = false;
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<TaylorScalar> uv(n);
      for (int i = 0; i < n; ++i) uv[i] = TaylorScalar::variable(n, 2, i, u[i]);
      std::vector<TaylorScalar> p = im.map(uv);
      // Gradient and Hessian of f(u) = 1/2 |phi(u) - x|^2.
      double grad[2] = {0, 0}, hess[4] = {0, 0, 0, 0};
      double scale = 0;
      for (int al = 0; al < d; ++al) {
        const double r = p[al].value() - x[al];
        for (int a = 0; a < n; ++a) {
          const double pa = p[al].derivative(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
          grad[a] += r * pa;
          scale += pa * pa;
          for (int b = 0; b < n; ++b) {
            const double pb = p[al].derivative(b == 0 ? 1 : 0, b == 0 ? 0 : 1);
            const double pab =
                p[al].derivative((a == 0) + (b == 0), (a == 1) + (b == 1));
            hess[a * n + b] += pa * pb + r * pab;
          }
        }
      }
      double gn = 0;
      for (int a = 0; a < n; ++a) gn += grad[a] * grad[a];
      if (gn < 1e-26 * (scale + 1.0) * (scale + 1.0)) {
        ok = true;
        break;
      }
      double step[2] = {0, 0};
      if (n == 1) {
        if (hess[0] == 0) break;
        step[0] = grad[0] / hess[0];
      } else {
        const double det = hess[0] * hess[3] - hess[1] * hess[2];
        if (det == 0) break;
        step[0] = (hess[3] * grad[0] - hess[1] * grad[1]) / det;
        step[1] = (-hess[2] * grad[0] + hess[0] * grad[1]) / det;
      }
      double limit = 0.5 * (im.seed_hi - im.seed_lo);
      for (int a = 0; a < n; ++a) {
        if (step[a] > limit) step[a] = limit;
        if (step[a] < -limit) step[a] = -limit;
        u[a] -= step[a];
      }
    }
    if (!ok) continue;
    const double f = detail::objective(im, u, x);
    if (f < best_f) {
      best_f = f;
      best.u = u;
      converged = true;
    }
  }
  if (!converged)
    throw ProjectionError("project: Newton failed from every seed (point outside the tube?)");

  best.foot = im.point(best.u);
  best.eta = 0;
  for (int al = 0; al < d; ++al)
    best.eta += (x[al] - best.foot[al]) * (x[al] - best.foot[al]);
  return best;
}

inline double eta(const DistanceField& df, const std::vector<double>& x) {
  return project(df, x).eta;
}

// A = (|x|^2 - eta)/2.
inline double potential(const DistanceField& df, const std::vector<double>& x) {
  double sq = 0;
  for (double c : x) sq += c * c;
  return (sq - project(df, x).eta) / 2;
}

// Dense symmetric k-tensor over ambient indices.
struct SymTensor {
  int d = 0, k = 0;
  std::vector<double> v;  // size d^k, fully filled

  double& at(const std::vector<int>& idx) {
    size_t p = 0;
    for (int i : idx) p = p * d + i;
    return v[p];
  }
  double at(const std::vector<int>& idx) const {
    size_t p = 0;
    for (int i : idx) p = p * d + i;
    return v[p];
  }
  double max_abs() const {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double norm2() const {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
  }
};

struct FdResult {
  SymTensor extrapolated;  // Richardson combination of the two step sizes
  SymTensor raw_h, raw_half;
  double max_asymmetry = 0;   // nested-stencil probe, absolute
  double observed_order = 0;  // convergence order estimated from raw vs extrapolated
};

namespace detail {

// Weights of the central stencil for the m-th derivative on nodes -s..s (unit
// spacing), accuracy order >= 4 for m <= 6 with s = ceil(m/2) + 1.
inline std::vector<double> stencil_weights(int m, int s) {
  const int nn = 2 * s + 1;
  std::vector<double> a(nn * nn), rhs(nn, 0.0);
  for (int r = 0; r < nn; ++r)
    for (int c = 0; c < nn; ++c) {
      double node = c - s;
      a[r * nn + c] = std::pow(node, r);
    }
  double fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  rhs[m] = fact;
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < nn; ++col) {
    int best = col;
    for (int r = col + 1; r < nn; ++r)
      if (std::abs(a[r * nn + col]) > std::abs(a[best * nn + col])) best = r;
    for (int c = 0; c < nn; ++c) std::swap(a[col * nn + c], a[best * nn + c]);
    std::swap(rhs[col], rhs[best]);
    for (int r = col + 1; r < nn; ++r) {
      const double f = a[r * nn + col] / a[col * nn + col];
      for (int c = col; c < nn; ++c) a[r * nn + c] -= f * a[col * nn + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> w(nn);
  for (int r = nn - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < nn; ++c) acc -= a[r * nn + c] * w[c];
    w[r] = acc / a[r * nn + r];
  }
  return w;
}

// Memoized A evaluation on a lattice around x0, keyed by integer offsets in
// units of `unit`; projections are warm-started from the base point.
struct LatticeCache {
  const DistanceField& df;
  std::vector<double> x0;
  double unit;
  std::vector<double> base_u;
  std::map<std::vector<int>, double> memo;

  LatticeCache(const DistanceField& f, std::vector<double> x, double u)
      : df(f), x0(std::move(x)), unit(u) {
    base_u = project(df, x0).u;
  }

  double value(const std::vector<int>& off) {
    auto it = memo.find(off);
    if (it != memo.end()) return it->second;
    std::vector<double> x = x0;
    for (size_t i = 0; i < off.size(); ++i) x[i] += unit * off[i];
    Projection pr = project(df, x, &base_u);
    double sq = 0;
    for (double c : x) sq += c * c;
    const double a = (sq - pr.eta) / 2;
    memo.emplace(off, a);
    return a;
  }
};

}  // namespace detail

// k-th ambient derivative tensor of A at a point x on M, by per-exponent
// tensor-product central stencils at steps h and h/2 combined by Richardson
// extrapolation. The per-exponent construction is symmetric by construction; a
// separate nested first-derivative probe (one slightly different step per
// nesting level, so the difference operators no longer commute) estimates the
// raw index-order sensitivity as a quality metric.
inline FdResult fd_Ak(const DistanceField& df, const std::vector<double>& x, int k,
                      double h) {
  if (k < 2 || k > 6) throw std::invalid_argument("fd_Ak: 2 <= k <= 6");
  const int d = df.im.d();
  const int reach = (k + 1) / 2 + 1;  // worst per-axis half-width at step h
  if (reach * h > df.halfwidth)
    throw StencilError("fd_Ak: stencil leaves the tubular neighborhood");

  detail::LatticeCache cache(df, x, h / 2);

  auto tensor_at = [&](int scale) {  // scale: offsets in h/2 units per node step
    SymTensor t;
    t.d = d;
    t.k = k;
    t.v.assign((size_t)std::pow(d, k), 0.0);
    std::vector<int> idx(k, 0);
    for (bool more = true; more;) {
      std::vector<int> expo(d, 0);
      for (int i : idx) ++expo[i];
      bool sorted = std::is_sorted(idx.begin(), idx.end());
      if (sorted) {  // compute once per exponent, fan out below
        std::vector<int> dims;
        std::vector<std::vector<double>> weights;
        std::vector<int> spans;
        for (int dim = 0; dim < d; ++dim) {
          if (expo[dim] == 0) continue;
          const int m = expo[dim];
          const int s = (m + 1) / 2 + 1;
          dims.push_back(dim);
          weights.push_back(detail::stencil_weights(m, s));
          spans.push_back(s);
        }
        double sum = 0;
        std::vector<int> node(dims.size(), 0);
        for (bool inner = true; inner;) {
          double w = 1;
          std::vector<int> off(d, 0);
          for (size_t i = 0; i < dims.size(); ++i) {
            const int nd = node[i] - spans[i];
            w *= weights[i][node[i]];
            off[dims[i]] = nd * scale;
          }
          sum += w * cache.value(off);
          inner = false;
          for (int i = (int)dims.size() - 1; i >= 0; --i) {
            if (++node[i] <= 2 * spans[i]) {
              inner = true;
              break;
            }
            node[i] = 0;
          }
        }
        for (size_t i = 0; i < dims.size(); ++i)
          sum /= std::pow(scale * h / 2, expo[dims[i]]);
        t.at(idx) = sum;
      }
      more = false;
      for (int i = k - 1; i >= 0; --i) {
        if (++idx[i] < d) {
          more = true;
          break;
        }
        idx[i] = 0;
      }
    }
    // Fill unsorted index tuples from their sorted representative.
    std::vector<int> idx2(k, 0);
    for (bool more = true; more;) {
      std::vector<int> srt = idx2;
      std::sort(srt.begin(), srt.end());
      t.at(idx2) = t.at(srt);
      more = false;
      for (int i = k - 1; i >= 0; --i) {
        if (++idx2[i] < d) {
          more = true;
          break;
        }
        idx2[i] = 0;
      }
    }
    return t;
  };

  FdResult r;
  r.raw_h = tensor_at(2);
  r.raw_half = tensor_at(1);
  r.extrapolated = r.raw_h;
  for (size_t i = 0; i < r.extrapolated.v.size(); ++i)
    r.extrapolated.v[i] = (16.0 * r.raw_half.v[i] - r.raw_h.v[i]) / 15.0;

  double eh = 0, eh2 = 0;
  for (size_t i = 0; i < r.extrapolated.v.size(); ++i) {
    eh = std::max(eh, std::abs(r.raw_h.v[i] - r.extrapolated.v[i]));
    eh2 = std::max(eh2, std::abs(r.raw_half.v[i] - r.extrapolated.v[i]));
  }
  r.observed_order = (eh > 0 && eh2 > 0) ? std::log2(eh / eh2) : 4.0;

  // Asymmetry probe: nested centred first differences, level l at step
  // h * (1 + l/8). Memoized per (suffix length, offset signature).
  {
    const std::vector<double> base_u = cache.base_u;
    std::map<std::array<std::int64_t, 4>, double> amemo;
    auto a_at = [&](const std::vector<double>& pt) {
      std::array<std::int64_t, 4> key{0, 0, 0, 0};
      for (int i = 0; i < d; ++i) key[i] = (std::int64_t)std::llround(pt[i] * 1e12);
      auto it = amemo.find(key);
      if (it != amemo.end()) return it->second;
      double sq = 0;
      for (double c : pt) sq += c * c;
      const double v = (sq - project(df, pt, &base_u).eta) / 2;
      amemo.emplace(key, v);
      return v;
    };
    std::vector<int> idx(k, 0);
    double asym = 0;
    std::map<std::vector<int>, double> probe;
    auto nested = [&](auto&& self, const std::vector<int>& seq, size_t level,
                      std::vector<double> pt) -> double {
      if (level == seq.size()) return a_at(pt);
      const double hl = h * (1.0 + (double)level / 8.0);
      std::vector<double> pp = pt, pm = pt;
      pp[seq[level]] += hl;
      pm[seq[level]] -= hl;
      return (self(self, seq, level + 1, pp) - self(self, seq, level + 1, pm)) / (2 * hl);
    };
    for (bool more = true; more;) {
      const double val = nested(nested, idx, 0, x);
      probe[idx] = val;
      more = false;
      for (int i = k - 1; i >= 0; --i) {
        if (++idx[i] < d) {
          more = true;
          break;
        }
        idx[i] = 0;
      }
    }
    for (auto& [tuple, val] : probe) {
      std::vector<int> srt = tuple;
      std::sort(srt.begin(), srt.end());
      asym = std::max(asym, std::abs(val - probe[srt]));
    }
    r.max_asymmetry = asym;
  }
  return r;
}

// Default step policy: a small fraction of the tube half-width (itself pinned to
// the local curvature radius per shape), widened for high k where roundoff in
// eta would otherwise dominate the h^k division.
inline double default_step(const DistanceField& df, int k) {
  static constexpr double c[7] = {0, 0, 0.02, 0.02, 0.03, 0.08, 0.12};
  return c[k] * df.halfwidth;
}

struct IdentityReport {
  // Max absolute errors of the five pointwise identities.
  double grad_is_projection = 0;   // grad A = nearest point (off-manifold probe)
  double hessian_is_tangent = 0;   // grad^2 A = tangent projection
  double b_from_a3 = 0;            // B^k_ij = A_ijs (delta - A)_ks
  double a3_from_b = 0;            // A_ijk = B^k_ij + B^i_jk + B^j_ki
  double trace_is_h = 0;           // H^k = sum_i A_iik
  double hessian_eta_normal = 0;   // grad^2 eta = 2 * normal projection
  int samples = 0;
};

// Check the projection/Hessian/third-derivative identities at sampled points,
// comparing the FD tensors against exact jets.
inline IdentityReport verify_prop1(const Immersion& im, int samples) {
  DistanceField df(im);
  IdentityReport rep;
  rep.samples = samples;
  const int n = im.n, d = im.d();

  for (int sp = 0; sp < samples; ++sp) {
    std::vector<double> u0(n);
    const double span = im.periodic ? 2 * M_PI : 2.0;
    const double lo = im.periodic ? 0.0 : -1.0;
    // Low-discrepancy-ish spread plus an irrational shift to dodge symmetry axes.
    u0[0] = lo + span * std::fmod(0.381966 + (double)sp / samples, 1.0);
    if (n == 2) u0[1] = lo + span * std::fmod(0.7548776662 * (sp + 1), 1.0);

    JetData jd = jets(im, u0, 1);
    const std::vector<double>& x = jd.point;

    // (i) grad A equals the projection foot, probed off the manifold.
    {
      const double hg = 1e-4 * df.halfwidth;
      for (double t : {0.25, -0.35}) {
        std::vector<double> y = x;
        for (int al = 0; al < d; ++al) y[al] += t * df.halfwidth * jd.frame[n][al];
        Projection pr = project(df, y);
        for (int al = 0; al < d; ++al) {
          std::vector<double> yp = y, ym = y;
          yp[al] += hg;
          ym[al] -= hg;
          std::vector<double> yp2 = y, ym2 = y;
          yp2[al] += 2 * hg;
          ym2[al] -= 2 * hg;
          const double g = (8 * (potential(df, yp) - potential(df, ym)) -
                            (potential(df, yp2) - potential(df, ym2))) /
                           (12 * hg);
          rep.grad_is_projection =
              std::max(rep.grad_is_projection, std::abs(g - pr.foot[al]));
        }
      }
    }

    FdResult f2 = fd_Ak(df, x, 2, default_step(df, 2));
    FdResult f3 = fd_Ak(df, x, 3, default_step(df, 3));

    // Tangent projection from the adapted frame.
    std::vector<double> tp(d * d, 0.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) tp[a * d + b] += jd.frame[i][a] * jd.frame[i][b];

    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const double hess = f2.extrapolated.at({a, b});
        rep.hessian_is_tangent =
            std::max(rep.hessian_is_tangent, std::abs(hess - tp[a * d + b]));
        // grad^2 eta = 2(I - grad^2 A) should be twice the normal projection.
        const double normal_proj = (a == b ? 1.0 : 0.0) - tp[a * d + b];
        rep.hessian_eta_normal = std::max(
            rep.hessian_eta_normal, std::abs(2 * ((a == b ? 1.0 : 0.0) - hess) - 2 * normal_proj));
      }

    // Ambient-extended B via frame pullback: Bt^lab_ab = sum_{ij} e_i^a e_j^b B^lab(e_i,e_j),
    // with the label read in ambient coordinates.
    std::vector<double> bt(d * d * d, 0.0);  // [a][b][lab]
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::vector<double> bv(d, 0.0);
        for (int beta = 0; beta < d; ++beta) {
          int s[3] = {i, j, beta};
          const double comp = jd.sample.at(0, s);
          for (int al = 0; al < d; ++al) bv[al] += comp * jd.frame[beta][al];
        }
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            for (int lab = 0; lab < d; ++lab)
              bt[(a * d + b) * d + lab] += jd.frame[i][a] * jd.frame[j][b] * bv[lab];
      }

    // (iii) B^lab_ab = A_abs (delta - A)_{lab s}.
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int lab = 0; lab < d; ++lab) {
          double rhs = 0;
          for (int s = 0; s < d; ++s)
            rhs += f3.extrapolated.at({a, b, s}) *
                   ((lab == s ? 1.0 : 0.0) - f2.extrapolated.at({lab, s}));
          rep.b_from_a3 =
              std::max(rep.b_from_a3, std::abs(bt[(a * d + b) * d + lab] - rhs));
        }

    // (iv) A_abc = Bt^c_ab + Bt^a_bc + Bt^b_ca.
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          const double rhs = bt[(a * d + b) * d + c] + bt[(b * d + c) * d + a] +
                             bt[(c * d + a) * d + b];
          rep.a3_from_b = std::max(
              rep.a3_from_b, std::abs(f3.extrapolated.at({a, b, c}) - rhs));
        }

    // (v) H^lab = sum_a A_aalab.
    for (int lab = 0; lab < d; ++lab) {
      double tr = 0;
      for (int a = 0; a < d; ++a) tr += f3.extrapolated.at({a, a, lab});
      double h_amb = 0;
      for (int beta = 0; beta < d; ++beta)
        h_amb += jd.mean_curvature[beta] * jd.frame[beta][lab];
      rep.trace_is_h = std::max(rep.trace_is_h, std::abs(tr - h_amb));
    }
  }
  return rep;
}

}  // namespace distjet
