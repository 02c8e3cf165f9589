#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "distjet/curve_ops.hpp"

using namespace distjet;

namespace {

std::vector<Vec2> clustered_circle(int n, double warp) {
  std::vector<Vec2> nodes(n);
  for (int i = 0; i < n; ++i) {
    const double u = (double)i / n;
    const double t = 2 * M_PI * u + warp * std::sin(2 * M_PI * u);
    nodes[i] = {std::cos(t), std::sin(t)};
  }
  return nodes;
}

double max_spacing_deviation(const std::vector<Vec2>& nodes) {
  const int n = (int)nodes.size();
  double lo = 1e300, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double d = norm(nodes[(i + 1) % n] - nodes[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return (hi - lo) / hi;
}

}  // namespace

TEST_CASE("derivative stencils converge at sixth order") {
  auto max_err = [](int n) {
    std::vector<double> f(n), d1, d2;
    for (int i = 0; i < n; ++i) f[i] = std::sin(2 * M_PI * i / n);
    detail::apply_stencil(f, detail::kD1, n, d1);
    detail::apply_stencil(f, detail::kD2, (double)n * n, d2);
    double e = 0;
    for (int i = 0; i < n; ++i) {
      const double p = 2 * M_PI * i / n;
      e = std::max(e, std::abs(d1[i] - 2 * M_PI * std::cos(p)));
      e = std::max(e, std::abs(d2[i] + 4 * M_PI * M_PI * std::sin(p)));
    }
    return e;
  };
  const double e32 = max_err(32), e64 = max_err(64);
  REQUIRE(e64 < 1e-5);
  REQUIRE(std::log2(e32 / e64) > 5.5);
}

TEST_CASE("circle geometry gives constant speed and curvature") {
  const double R = 2.0;
  CurveGeometry g;
  curve_geometry(circle_nodes(R, 128), 3, g);
  for (int i = 0; i < 128; ++i) {
    REQUIRE(g.speed[i] == Catch::Approx(2 * M_PI * R).epsilon(1e-9));
    REQUIRE(g.kappa[0][i] == Catch::Approx(1.0 / R).epsilon(1e-9));
    REQUIRE(std::abs(g.kappa[1][i]) < 1e-7);
    REQUIRE(std::abs(g.kappa[2][i]) < 1e-5);
  }
}

TEST_CASE("ellipse curvature matches the analytic formula") {
  const double a = 2.0, b = 1.0;
  auto max_err = [&](int n) {
    CurveGeometry g;
    curve_geometry(ellipse_nodes(a, b, n), 1, g);
    double e = 0;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * M_PI * i / n;
      const double denom = std::hypot(a * std::sin(t), b * std::cos(t));
      const double exact = a * b / (denom * denom * denom);
      e = std::max(e, std::abs(g.kappa[0][i] - exact));
    }
    return e;
  };
  const double e128 = max_err(128), e256 = max_err(256);
  REQUIRE(e256 < 1e-5);
  REQUIRE(std::log2(e128 / e256) > 5.0);
}

TEST_CASE("length and area of sampled shapes") {
  CurveGeometry g;
  curve_geometry(circle_nodes(1.5, 128), 1, g);
  REQUIRE(curve_length(g) == Catch::Approx(2 * M_PI * 1.5).epsilon(1e-9));

  CurveGeometry ge;
  curve_geometry(ellipse_nodes(2, 1, 256), 1, ge);
  CurveGeometry gref;
  curve_geometry(ellipse_nodes(2, 1, 2048), 1, gref);
  REQUIRE(curve_length(ge) == Catch::Approx(curve_length(gref)).epsilon(1e-9));

  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  REQUIRE(polygon_area(square) == 1.0);
  REQUIRE(polygon_area({{0, 0}, {0, 1}, {1, 1}, {1, 0}}) == -1.0);

  const double area = polygon_area(circle_nodes(1.0, 128));
  REQUIRE(area < M_PI);
  REQUIRE(area == Catch::Approx(M_PI).margin(2e-3));
}

TEST_CASE("isoperimetric deviation separates circles from ellipses") {
  CurveGeometry g;
  curve_geometry(circle_nodes(1.0, 128), 1, g);
  const double dev_circle =
      isoperimetric_deviation(curve_length(g), polygon_area(circle_nodes(1.0, 128)));
  REQUIRE(dev_circle >= 0.0);
  REQUIRE(dev_circle < 2e-3);

  CurveGeometry ge;
  const std::vector<Vec2> ell = ellipse_nodes(2, 1, 256);
  curve_geometry(ell, 1, ge);
  // L = 9.6884482, A = 2*pi for the 2:1 ellipse.
  REQUIRE(isoperimetric_deviation(curve_length(ge), polygon_area(ell)) ==
          Catch::Approx(0.1588).margin(2e-3));
}

TEST_CASE("circle fit recovers center and radius") {
  const CircleFit fit = fit_circle(circle_nodes(1.7, 64, {0.3, -0.2}));
  REQUIRE(fit.center.x == Catch::Approx(0.3).margin(1e-12));
  REQUIRE(fit.center.y == Catch::Approx(-0.2).margin(1e-12));
  REQUIRE(fit.radius == Catch::Approx(1.7).epsilon(1e-12));

  const CircleFit bad = fit_circle({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  REQUIRE(std::isnan(bad.radius));
}

TEST_CASE("self-intersection detection") {
  REQUIRE_FALSE(self_intersects(circle_nodes(1.0, 64)));
  REQUIRE_FALSE(self_intersects(ellipse_nodes(2, 1, 64)));

  std::vector<Vec2> eight(64);
  for (int i = 0; i < 64; ++i) {
    const double t = 2 * M_PI * i / 64;
    eight[i] = {std::sin(2 * t), std::sin(t)};
  }
  REQUIRE(self_intersects(eight));

  // Two lobes pinched to a 0.01 gap stay simple.
  std::vector<Vec2> pinched(128);
  for (int i = 0; i < 128; ++i) {
    const double t = 2 * M_PI * i / 128;
    const double r = 1.0 - 0.495 * (1 - std::cos(2 * t));
    pinched[i] = {r * std::cos(t), r * std::sin(t)};
  }
  REQUIRE_FALSE(self_intersects(pinched));
}

TEST_CASE("arc-length resampling equalizes spacing without leaving the curve") {
  const std::vector<Vec2> warped = clustered_circle(64, 0.5);
  REQUIRE(max_spacing_deviation(warped) > 0.3);

  const std::vector<Vec2> even = resample_arclength(warped);
  REQUIRE((int)even.size() == 64);
  REQUIRE(max_spacing_deviation(even) < 1e-3);
  REQUIRE(even[0].x == warped[0].x);
  REQUIRE(even[0].y == warped[0].y);
  for (const Vec2& p : even) REQUIRE(norm(p) == Catch::Approx(1.0).margin(1e-4));

  // Already uniform nodes are a fixed point.
  const std::vector<Vec2> uniform = circle_nodes(1.0, 64);
  const std::vector<Vec2> again = resample_arclength(uniform);
  for (int i = 0; i < 64; ++i) REQUIRE(norm(again[i] - uniform[i]) < 1e-12);
}
