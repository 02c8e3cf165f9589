#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

// Discrete closed plane curves: N nodes sample x(p) on a uniform periodic
// parameter grid p_i = i/N. Derivatives use centered order-6 stencils, so
// smooth-curve quantities converge at sixth order; integrals use the
// trapezoidal rule, which on a periodic grid is the plain node sum times dp.

namespace distjet {

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double c) {
    x *= c;
    y *= c;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend Vec2 operator*(double c, Vec2 a) { return a *= c; }
  friend Vec2 operator*(Vec2 a, double c) { return a *= c; }
  friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
  friend double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
  friend double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
};

namespace detail {

// Centered 7-point first- and second-derivative weights (order 6).
inline constexpr double kD1[7] = {-1.0 / 60, 9.0 / 60,  -45.0 / 60, 0.0,
                                  45.0 / 60, -9.0 / 60, 1.0 / 60};
inline constexpr double kD2[7] = {2.0 / 180,    -27.0 / 180, 270.0 / 180, -490.0 / 180,
                                  270.0 / 180,  -27.0 / 180, 2.0 / 180};

template <class T>
void apply_stencil(const std::vector<T>& f, const double (&c)[7], double scale,
                   std::vector<T>& out) {
  const int n = (int)f.size();
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    T acc{};
    for (int j = 0; j < 7; ++j) {
      int idx = i + j - 3;
      if (idx < 0) idx += n;
      if (idx >= n) idx -= n;
      acc += c[j] * f[idx];
    }
    out[i] = scale * acc;
  }
}

}  // namespace detail

// Pointwise parametric derivatives and arc-length curvature jets of a node
// polygon. kappa[l][i] is the l-th arc-length derivative of the curvature at
// node i; levels chain through u' = (du/dp) / speed.
struct CurveGeometry {
  double dp = 0;
  std::vector<Vec2> x1, x2;
  std::vector<double> speed;
  std::vector<std::vector<double>> kappa;
};

inline void curve_geometry(const std::vector<Vec2>& nodes, int jet_count,
                           CurveGeometry& out) {
  const int n = (int)nodes.size();
  if (n < 7) throw std::invalid_argument("curve_geometry: need at least 7 nodes");
  if (jet_count < 1) throw std::invalid_argument("curve_geometry: jet_count must be >= 1");
  out.dp = 1.0 / n;
  detail::apply_stencil(nodes, detail::kD1, n, out.x1);
  detail::apply_stencil(nodes, detail::kD2, (double)n * n, out.x2);
  out.speed.resize(n);
  for (int i = 0; i < n; ++i) {
    out.speed[i] = norm(out.x1[i]);
    if (out.speed[i] <= 0)
      throw std::invalid_argument("curve_geometry: degenerate parametrization");
  }
  out.kappa.assign(jet_count, {});
  out.kappa[0].resize(n);
  for (int i = 0; i < n; ++i) {
    const double sp = out.speed[i];
    out.kappa[0][i] = cross(out.x1[i], out.x2[i]) / (sp * sp * sp);
  }
  for (int l = 1; l < jet_count; ++l) {
    detail::apply_stencil(out.kappa[l - 1], detail::kD1, n, out.kappa[l]);
    for (int i = 0; i < n; ++i) out.kappa[l][i] /= out.speed[i];
  }
}

inline double curve_length(const CurveGeometry& g) {
  double sum = 0;
  for (double sp : g.speed) sum += sp;
  return sum * g.dp;
}

// Signed shoelace area; positive for counterclockwise orientation.
inline double polygon_area(const std::vector<Vec2>& nodes) {
  const int n = (int)nodes.size();
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += cross(nodes[i], nodes[(i + 1) % n]);
  return sum / 2;
}

// 1 - 4*pi*|A|/L^2: zero exactly on circles, positive otherwise.
inline double isoperimetric_deviation(double length, double area) {
  return 1.0 - 4.0 * M_PI * std::abs(area) / (length * length);
}

struct CircleFit {
  Vec2 center;
  double radius = std::numeric_limits<double>::quiet_NaN();
};

// Least-squares circle through the nodes (linear in center and radius^2).
inline CircleFit fit_circle(const std::vector<Vec2>& nodes) {
  double a[3][4] = {};
  for (const Vec2& p : nodes) {
    const double row[3] = {p.x, p.y, 1.0};
    const double rhs = dot(p, p);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] += row[i] * row[j];
      a[i][3] += row[i] * rhs;
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-14) return {};
    if (piv != col)
      for (int j = 0; j < 4; ++j) std::swap(a[col][j], a[piv][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
    }
  }
  const double cx = a[0][3] / a[0][0] / 2;
  const double cy = a[1][3] / a[1][1] / 2;
  const double c0 = a[2][3] / a[2][2];
  CircleFit fit;
  fit.center = {cx, cy};
  fit.radius = std::sqrt(std::max(0.0, c0 + cx * cx + cy * cy));
  return fit;
}

namespace detail {

inline bool bbox_disjoint(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  return std::max(a0.x, a1.x) < std::min(b0.x, b1.x) ||
         std::max(b0.x, b1.x) < std::min(a0.x, a1.x) ||
         std::max(a0.y, a1.y) < std::min(b0.y, b1.y) ||
         std::max(b0.y, b1.y) < std::min(a0.y, a1.y);
}

inline int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return v > 0 ? 1 : v < 0 ? -1 : 0;
}

inline bool segments_cross(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const int o1 = orient(a0, a1, b0);
  const int o2 = orient(a0, a1, b1);
  const int o3 = orient(b0, b1, a0);
  const int o4 = orient(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  auto on = [](Vec2 p, Vec2 q, Vec2 r) {
    return detail::orient(p, q, r) == 0 && std::min(p.x, q.x) <= r.x &&
           r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  return on(a0, a1, b0) || on(a0, a1, b1) || on(b0, b1, a0) || on(b0, b1, a1);
}

}  // namespace detail

// True when any two non-adjacent polygon edges meet.
inline bool self_intersects(const std::vector<Vec2>& nodes) {
  const int n = (int)nodes.size();
  for (int i = 0; i < n; ++i) {
    const Vec2 a0 = nodes[i], a1 = nodes[(i + 1) % n];
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Vec2 b0 = nodes[j], b1 = nodes[(j + 1) % n];
      if (detail::bbox_disjoint(a0, a1, b0, b1)) continue;
      if (detail::segments_cross(a0, a1, b0, b1)) return true;
    }
  }
  return false;
}

namespace detail {

// Periodic cubic Lagrange interpolation at fractional node index.
inline Vec2 interp_cubic(const std::vector<Vec2>& nodes, double idx) {
  const int n = (int)nodes.size();
  const int i0 = (int)std::floor(idx);
  const double u = idx - i0;
  const double w0 = -u * (u - 1) * (u - 2) / 6;
  const double w1 = (u + 1) * (u - 1) * (u - 2) / 2;
  const double w2 = -(u + 1) * u * (u - 2) / 2;
  const double w3 = (u + 1) * u * (u - 1) / 6;
  auto at = [&](int i) { return nodes[((i % n) + n) % n]; };
  return w0 * at(i0 - 1) + w1 * at(i0) + w2 * at(i0 + 1) + w3 * at(i0 + 2);
}

}  // namespace detail

// Redistribute nodes to uniform chord arc length, keeping node 0 in place.
// Normal displacement is fourth order in the spacing; tangential sliding is a
// reparametrization and does not change the curve.
inline std::vector<Vec2> resample_arclength(const std::vector<Vec2>& nodes) {
  const int n = (int)nodes.size();
  std::vector<Vec2> cur = nodes;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> s(n + 1, 0.0);
    for (int i = 0; i < n; ++i) s[i + 1] = s[i] + norm(cur[(i + 1) % n] - cur[i]);
    const double total = s[n];
    if (total <= 0) throw std::invalid_argument("resample_arclength: degenerate polygon");
    std::vector<Vec2> next(n);
    int seg = 0;
    for (int j = 0; j < n; ++j) {
      const double target = total * j / n;
      while (seg + 1 < n && s[seg + 1] < target) ++seg;
      const double span = s[seg + 1] - s[seg];
      const double frac = span > 0 ? (target - s[seg]) / span : 0.0;
      next[j] = detail::interp_cubic(cur, seg + frac);
    }
    cur = std::move(next);
  }
  return cur;
}

inline std::vector<Vec2> circle_nodes(double radius, int count, Vec2 center = {}) {
  std::vector<Vec2> nodes(count);
  for (int i = 0; i < count; ++i) {
    const double t = 2 * M_PI * i / count;
    nodes[i] = {center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  }
  return nodes;
}

inline std::vector<Vec2> ellipse_nodes(double a, double b, int count) {
  std::vector<Vec2> nodes(count);
  for (int i = 0; i < count; ++i) {
    const double t = 2 * M_PI * i / count;
    nodes[i] = {a * std::cos(t), b * std::sin(t)};
  }
  return nodes;
}

}  // namespace distjet
