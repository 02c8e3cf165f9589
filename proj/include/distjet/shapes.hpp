#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "distjet/taylor.hpp"

// Analytic immersions used throughout: closed parametrized curves/surfaces plus
// flat controls. The chart maps parameter Taylor scalars to ambient ones, so any
// derivative order falls out of one evaluation. `tube` is a conservative
// tubular-neighborhood half-width (below the focal distance).

namespace distjet {

struct Immersion {
  std::string name;
  int n = 1;  // intrinsic dimension
  int m = 1;  // codimension
  bool periodic = true;
  double seed_lo = 0.0, seed_hi = 2.0 * M_PI;  // multistart seed range per variable
  double tube = 0.5;
  std::function<std::vector<TaylorScalar>(const std::vector<TaylorScalar>&)> chart;
  std::vector<std::vector<double>> rotation;  // optional ambient rotation, row-major

  int d() const { return n + m; }

  std::vector<TaylorScalar> map(const std::vector<TaylorScalar>& u) const {
    std::vector<TaylorScalar> x = chart(u);
    if (rotation.empty()) return x;
    std::vector<TaylorScalar> y(x.size(), TaylorScalar(u[0].nvars(), u[0].order()));
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t j = 0; j < x.size(); ++j) y[i] += rotation[i][j] * x[j];
    return y;
  }

  // Plain-double evaluation (order-0 series under the hood).
  std::vector<double> point(const std::vector<double>& u) const {
    std::vector<TaylorScalar> uv(n);
    for (int i = 0; i < n; ++i) uv[i] = TaylorScalar::constant(n == 2 ? 2 : 1, 0, u[i]);
    std::vector<TaylorScalar> x = map(uv);
    std::vector<double> p(x.size());
    for (size_t i = 0; i < x.size(); ++i) p[i] = x[i].value();
    return p;
  }
};

inline Immersion make_circle(double R) {
  Immersion im;
  im.name = "circle";
  im.n = 1;
  im.m = 1;
  im.tube = R / 2;
  im.chart = [R](const std::vector<TaylorScalar>& u) {
    return std::vector<TaylorScalar>{R * cos(u[0]), R * sin(u[0])};
  };
  return im;
}

inline Immersion make_ellipse(double a, double b) {
  Immersion im;
  im.name = "ellipse";
  im.n = 1;
  im.m = 1;
  im.tube = (b * b) / (2 * a);  // half the smallest curvature radius
  im.chart = [a, b](const std::vector<TaylorScalar>& u) {
    return std::vector<TaylorScalar>{a * cos(u[0]), b * sin(u[0])};
  };
  return im;
}

inline Immersion make_torus3(double R, double r) {
  Immersion im;
  im.name = "torus3";
  im.n = 2;
  im.m = 1;
  im.tube = r / 2;
  im.chart = [R, r](const std::vector<TaylorScalar>& u) {
    TaylorScalar ring = R + r * cos(u[1]);
    return std::vector<TaylorScalar>{ring * cos(u[0]), ring * sin(u[0]), r * sin(u[1])};
  };
  return im;
}

inline Immersion make_clifford4(double R) {
  Immersion im;
  im.name = "clifford4";
  im.n = 2;
  im.m = 2;
  im.tube = R / 2;
  im.chart = [R](const std::vector<TaylorScalar>& u) {
    return std::vector<TaylorScalar>{R * cos(u[0]), R * sin(u[0]), R * cos(u[1]),
                                     R * sin(u[1])};
  };
  return im;
}

inline Immersion make_line() {
  Immersion im;
  im.name = "line";
  im.n = 1;
  im.m = 1;
  im.periodic = false;
  im.seed_lo = -3.0;
  im.seed_hi = 3.0;
  im.tube = 1.0;
  im.chart = [](const std::vector<TaylorScalar>& u) {
    return std::vector<TaylorScalar>{u[0], TaylorScalar::constant(u[0].nvars(), u[0].order(), 0.0)};
  };
  return im;
}

inline Immersion make_plane() {
  Immersion im;
  im.name = "plane";
  im.n = 2;
  im.m = 1;
  im.periodic = false;
  im.seed_lo = -3.0;
  im.seed_hi = 3.0;
  im.tube = 1.0;
  im.chart = [](const std::vector<TaylorScalar>& u) {
    return std::vector<TaylorScalar>{u[0], u[1],
                                     TaylorScalar::constant(u[0].nvars(), u[0].order(), 0.0)};
  };
  return im;
}

// Shape spec strings as accepted on the command line, e.g. "circle:R=1",
// "ellipse:a=2,b=1", "torus3:R=2,r=0.5", "clifford4:R=1", "plane", "line".
inline Immersion parse_shape(const std::string& spec) {
  std::string kind = spec;
  std::vector<std::pair<std::string, double>> kv;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                     : comma - pos);
      size_t eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("shape: expected key=value in '" + spec + "'");
      kv.push_back({item.substr(0, eq), std::stod(item.substr(eq + 1))});
      pos = comma == std::string::npos ? rest.size() : comma + 1;
    }
  }
  auto get = [&](const std::string& key, double dflt) {
    for (auto& [k, v] : kv)
      if (k == key) return v;
    return dflt;
  };
  if (kind == "circle") return make_circle(get("R", 1.0));
  if (kind == "ellipse") return make_ellipse(get("a", 2.0), get("b", 1.0));
  if (kind == "torus3") return make_torus3(get("R", 2.0), get("r", 0.5));
  if (kind == "clifford4") return make_clifford4(get("R", 1.0));
  if (kind == "plane") return make_plane();
  if (kind == "line") return make_line();
  throw std::invalid_argument("shape: unknown kind '" + kind + "'");
}

// Ambient Givens rotation in coordinates (i, j); compose for generic poses.
inline std::vector<std::vector<double>> givens_rotation(int d, int i, int j, double theta) {
  std::vector<std::vector<double>> q(d, std::vector<double>(d, 0.0));
  for (int a = 0; a < d; ++a) q[a][a] = 1.0;
  q[i][i] = std::cos(theta);
  q[j][j] = std::cos(theta);
  q[i][j] = -std::sin(theta);
  q[j][i] = std::sin(theta);
  return q;
}

inline Immersion rotated(Immersion im, const std::vector<std::vector<double>>& q) {
  if (im.rotation.empty()) {
    im.rotation = q;
    return im;
  }
  const int d = im.d();
  std::vector<std::vector<double>> prod(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) prod[i][j] += q[i][k] * im.rotation[k][j];
  im.rotation = std::move(prod);
  return im;
}

}  // namespace distjet
