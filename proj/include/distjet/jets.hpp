#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "distjet/jet_sample.hpp"
#include "distjet/shapes.hpp"
#include "distjet/taylor.hpp"

// Pointwise geometric jets of an immersion: induced metric, Christoffel symbols,
// the second fundamental form and its ambient-frozen covariant derivatives, all
// obtained from one Taylor expansion of the chart. The derivatives D^aB are
// assembled in parameter coordinates as series (each step: differentiate the
// component functions, subtract a Christoffel correction on every tangent slot,
// leave the ambient label alone), evaluated at the point, and only then rotated
// into the adapted orthonormal frame.

namespace distjet {

struct JetData {
  std::vector<double> point;               // ambient position
  std::vector<std::vector<double>> frame;  // d rows: n tangent, then m normal
  std::vector<double> metric;              // g_ab, n x n
  std::vector<double> christoffel;         // Gamma^c_ab at (c*n + a)*n + b
  JetSample sample;                        // adapted-frame D^aB
  std::vector<double> mean_curvature;      // adapted-frame components, size d
};

namespace detail {

// Dense tensor of Taylor scalars over `slots` tangent indices (range n) plus one
// ambient label (range d); index = (((s1*n + s2)*n + ...)*d + label).
struct SeriesJet {
  int slots = 0;
  std::vector<TaylorScalar> v;
};

inline size_t sj_index(const SeriesJet& t, const std::vector<int>& s, int n, int d, int label) {
  size_t idx = 0;
  for (int i = 0; i < t.slots; ++i) idx = idx * n + s[i];
  return idx * d + label;
}

}  // namespace detail

inline JetData jets(const Immersion& im, const std::vector<double>& u0, int a_max) {
  const int n = im.n, d = im.d();
  const int nv = n;
  const int P = a_max + 3;

  std::vector<TaylorScalar> u(n);
  for (int i = 0; i < n; ++i) u[i] = TaylorScalar::variable(nv, P, i, u0[i]);
  std::vector<TaylorScalar> x = im.map(u);
  if ((int)x.size() != d) throw std::logic_error("jets: chart dimension mismatch");

  std::vector<std::vector<TaylorScalar>> tang(n);
  for (int a = 0; a < n; ++a) {
    tang[a].reserve(d);
    for (int al = 0; al < d; ++al) tang[a].push_back(x[al].partial(a));
  }

  std::vector<TaylorScalar> g(n * n, TaylorScalar(nv, P));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int al = 0; al < d; ++al) g[a * n + b] += tang[a][al] * tang[b][al];

  std::vector<TaylorScalar> ginv(n * n, TaylorScalar(nv, P));
  if (n == 1) {
    ginv[0] = recip(g[0]);
  } else {
    TaylorScalar rdet = recip(g[0] * g[3] - g[1] * g[2]);
    ginv[0] = g[3] * rdet;
    ginv[3] = g[0] * rdet;
    ginv[1] = -(g[1] * rdet);
    ginv[2] = -(g[2] * rdet);
  }
  if (std::abs((g[0] * ginv[0]).value() + (n == 2 ? (g[1] * ginv[2]).value() : 0.0) - 1.0) > 1e-8)
    throw std::runtime_error("jets: degenerate metric (immersion fails at this point)");

  std::vector<TaylorScalar> gamma(n * n * n, TaylorScalar(nv, P));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        TaylorScalar sum(nv, P);
        for (int e = 0; e < n; ++e)
          sum += ginv[c * n + e] *
                 (g[e * n + b].partial(a) + g[e * n + a].partial(b) - g[a * n + b].partial(e));
        gamma[(c * n + a) * n + b] = sum * 0.5;
      }

  // D^0B in coordinates: normal part of the second chart derivatives.
  std::vector<detail::SeriesJet> cjets(a_max + 1);
  cjets[0].slots = 2;
  cjets[0].v.assign((size_t)n * n * d, TaylorScalar(nv, P));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int al = 0; al < d; ++al) {
        TaylorScalar val = x[al].partial(a).partial(b);
        for (int c = 0; c < n; ++c) val -= gamma[(c * n + a) * n + b] * tang[c][al];
        cjets[0].v[((size_t)a * n + b) * d + al] = val;
      }

  for (int r = 0; r < a_max; ++r) {
    const detail::SeriesJet& prev = cjets[r];
    detail::SeriesJet& next = cjets[r + 1];
    next.slots = prev.slots + 1;
    size_t sz = d;
    for (int i = 0; i < next.slots; ++i) sz *= n;
    next.v.assign(sz, TaylorScalar(nv, P));

    std::vector<int> s(next.slots, 0);
    for (bool more = true; more;) {
      std::vector<int> ps(s.begin() + 1, s.end());
      for (int al = 0; al < d; ++al) {
        TaylorScalar val = prev.v[detail::sj_index(prev, ps, n, d, al)].partial(s[0]);
        for (int t = 0; t < prev.slots; ++t) {
          std::vector<int> qs = ps;
          for (int e = 0; e < n; ++e) {
            qs[t] = e;
            val -= gamma[(e * n + s[0]) * n + ps[t]] * prev.v[detail::sj_index(prev, qs, n, d, al)];
          }
        }
        next.v[detail::sj_index(next, s, n, d, al)] = val;
      }
      more = false;
      for (int t = next.slots - 1; t >= 0; --t) {
        if (++s[t] < n) {
          more = true;
          break;
        }
        s[t] = 0;
      }
    }
  }

  JetData out;
  out.point.resize(d);
  for (int al = 0; al < d; ++al) out.point[al] = x[al].value();
  out.metric.resize(n * n);
  for (int i = 0; i < n * n; ++i) out.metric[i] = g[i].value();
  out.christoffel.resize(n * n * n);
  for (int i = 0; i < n * n * n; ++i) out.christoffel[i] = gamma[i].value();

  // Adapted frame: Gram-Schmidt on the coordinate tangents (tracking the change
  // of basis S with e_i = sum_a S[i][a] t_a), then residual completion over the
  // coordinate axes for the normal directions.
  std::vector<std::vector<double>> tv(n, std::vector<double>(d));
  for (int a = 0; a < n; ++a)
    for (int al = 0; al < d; ++al) tv[a][al] = tang[a][al].value();

  std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
  out.frame.assign(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<double> v = tv[i];
    std::vector<double> coef(n, 0.0);
    coef[i] = 1.0;
    for (int j = 0; j < i; ++j) {
      double proj = 0;
      for (int al = 0; al < d; ++al) proj += v[al] * out.frame[j][al];
      for (int al = 0; al < d; ++al) v[al] -= proj * out.frame[j][al];
      for (int b = 0; b < n; ++b) coef[b] -= proj * S[j][b];
    }
    double nrm = 0;
    for (double c : v) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw std::runtime_error("jets: degenerate tangent frame");
    for (int al = 0; al < d; ++al) out.frame[i][al] = v[al] / nrm;
    for (int b = 0; b < n; ++b) S[i][b] = coef[b] / nrm;
  }
  for (int r = n; r < d; ++r) {
    double best_norm = -1;
    std::vector<double> best_v;
    for (int cand = 0; cand < d; ++cand) {
      std::vector<double> v(d, 0.0);
      v[cand] = 1.0;
      for (int j = 0; j < r; ++j) {
        double proj = out.frame[j][cand];
        for (int al = 0; al < d; ++al) v[al] -= proj * out.frame[j][al];
      }
      double nrm = 0;
      for (double c : v) nrm += c * c;
      if (nrm > best_norm) {
        best_norm = nrm;
        best_v = std::move(v);
      }
    }
    const double nrm = std::sqrt(best_norm);
    for (int al = 0; al < d; ++al) out.frame[r][al] = best_v[al] / nrm;
  }

  // Coordinate values -> adapted frame, one tangent slot at a time, label last.
  out.sample.n = n;
  out.sample.m = im.m;
  out.sample.jets.resize(a_max + 1);
  for (int a = 0; a <= a_max; ++a) {
    const int slots = a + 2;
    std::vector<double> cur(cjets[a].v.size());
    for (size_t i = 0; i < cur.size(); ++i) cur[i] = cjets[a].v[i].value();

    std::vector<double> tmp(cur.size());
    for (int t = 0; t < slots; ++t) {
      size_t pre = 1;
      for (int i = 0; i < t; ++i) pre *= n;
      size_t post = d;
      for (int i = t + 1; i < slots; ++i) post *= n;
      for (size_t p = 0; p < pre; ++p)
        for (int i = 0; i < n; ++i)
          for (size_t q = 0; q < post; ++q) {
            double sum = 0;
            for (int c = 0; c < n; ++c) sum += S[i][c] * cur[(p * n + c) * post + q];
            tmp[(p * n + i) * post + q] = sum;
          }
      std::swap(cur, tmp);
    }
    std::vector<double>& dst = out.sample.jets[a];
    dst.assign(cur.size(), 0.0);
    const size_t blocks = cur.size() / d;
    for (size_t b = 0; b < blocks; ++b)
      for (int beta = 0; beta < d; ++beta) {
        double sum = 0;
        for (int al = 0; al < d; ++al) sum += out.frame[beta][al] * cur[b * d + al];
        dst[b * d + beta] = sum;
      }
  }

  out.mean_curvature.assign(d, 0.0);
  for (int beta = 0; beta < d; ++beta) {
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      int s[3] = {i, i, beta};
      sum += out.sample.at(0, s);
    }
    out.mean_curvature[beta] = sum;
  }
  return out;
}

}  // namespace distjet
