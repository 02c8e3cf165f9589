#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "distjet/distance_field.hpp"
#include "distjet/jets.hpp"
#include "distjet/shapes.hpp"

using namespace distjet;

TEST_CASE("circle projection and squared distance") {
  const double R = 2.0;
  DistanceField df(make_circle(R));

  for (double th : {0.0, 0.9, 2.5, 4.4}) {
    std::vector<double> on = {R * std::cos(th), R * std::sin(th)};
    CHECK(eta(df, on) < 1e-15);

    std::vector<double> off = {(R + 0.3) * std::cos(th), (R + 0.3) * std::sin(th)};
    Projection pr = project(df, off);
    CHECK(pr.eta == Catch::Approx(0.09).margin(1e-12));
    CHECK(pr.foot[0] == Catch::Approx(R * std::cos(th)).margin(1e-10));
    CHECK(pr.foot[1] == Catch::Approx(R * std::sin(th)).margin(1e-10));

    std::vector<double> in = {(R - 0.4) * std::cos(th), (R - 0.4) * std::sin(th)};
    CHECK(eta(df, in) == Catch::Approx(0.16).margin(1e-12));
  }
}

namespace {

// Brute-force squared distance to a 1-parameter immersion: dense scan plus a
// parabolic refinement of the best sample triple.
double dense_eta(const Immersion& im, const std::vector<double>& x, int samples) {
  double best = 1e300;
  int ibest = 0;
  const double span = im.seed_hi - im.seed_lo;
  auto f = [&](double u) {
    std::vector<double> p = im.point({u});
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) s += (p[i] - x[i]) * (p[i] - x[i]);
    return s;
  };
  for (int i = 0; i < samples; ++i) {
    const double v = f(im.seed_lo + span * i / samples);
    if (v < best) {
      best = v;
      ibest = i;
    }
  }
  const double du = span / samples;
  const double u0 = im.seed_lo + span * ibest / samples;
  const double fm = f(u0 - du), f0 = f(u0), fp = f(u0 + du);
  const double denom = fm - 2 * f0 + fp;
  if (denom <= 0) return f0;
  return f(u0 + du * 0.5 * (fm - fp) / denom);
}

}  // namespace

TEST_CASE("ellipse projection matches dense search") {
  Immersion el = make_ellipse(2.0, 1.0);
  DistanceField df(el);
  const std::vector<std::vector<double>> pts = {
      {3.0, 0.2}, {0.5, 0.3}, {1.2, -0.7}, {-1.9, 0.4}};
  for (const auto& x : pts) {
    const double ref = dense_eta(el, x, 1000000);
    CHECK(eta(df, x) == Catch::Approx(ref).margin(1e-9));
  }
}

TEST_CASE("unit circle third derivative components") {
  DistanceField df(make_circle(1.0));
  // Point (1,0): tangent is the y axis, normal the x axis.
  FdResult f3 = fd_Ak(df, {1.0, 0.0}, 3, default_step(df, 3));
  CHECK(f3.extrapolated.at({1, 1, 0}) == Catch::Approx(-1.0).margin(1e-6));
  CHECK(f3.extrapolated.at({1, 1, 1}) == Catch::Approx(0.0).margin(1e-6));
  CHECK(f3.extrapolated.at({0, 0, 0}) == Catch::Approx(0.0).margin(1e-6));
  CHECK(f3.extrapolated.at({0, 1, 1}) == Catch::Approx(f3.extrapolated.at({1, 1, 0})).margin(1e-10));
  // Full contraction: for a curve with |B| = kappa this is 3 kappa^2.
  CHECK(f3.extrapolated.norm2() == Catch::Approx(3.0).margin(1e-5));
  CHECK(f3.observed_order > 2.0);
  CHECK(f3.max_asymmetry < 1e-2);
}

TEST_CASE("flat shapes have vanishing higher derivatives") {
  for (const Immersion& im : {make_line(), make_plane()}) {
    DistanceField df(im);
    std::vector<double> x = im.point(std::vector<double>(im.n, 0.37));
    CHECK(fd_Ak(df, x, 3, default_step(df, 3)).extrapolated.max_abs() < 1e-6);
    CHECK(fd_Ak(df, x, 4, default_step(df, 4)).extrapolated.max_abs() < 1e-6);
  }
}

TEST_CASE("derivative tensors scale like lambda^(2-k)") {
  const double lam = 2.0;
  DistanceField small(make_ellipse(2.0, 1.0));
  DistanceField big(make_ellipse(2.0 * lam, 1.0 * lam));
  const double u = 0.9;
  std::vector<double> x = small.im.point({u});
  std::vector<double> lx = big.im.point({u});
  for (int k : {3, 4}) {
    FdResult a = fd_Ak(small, x, k, default_step(small, k));
    FdResult b = fd_Ak(big, lx, k, default_step(big, k));
    const double factor = std::pow(lam, 2.0 - k);
    for (size_t i = 0; i < a.extrapolated.v.size(); ++i)
      CHECK(b.extrapolated.v[i] ==
            Catch::Approx(factor * a.extrapolated.v[i]).margin(1e-3 * std::abs(factor)));
  }
}

TEST_CASE("tensor norm is rotation invariant") {
  Immersion el = make_ellipse(2.0, 1.0);
  Immersion rot = rotated(el, givens_rotation(2, 0, 1, 0.7));
  DistanceField df0(el), df1(rot);
  const double u = 1.3;
  FdResult a = fd_Ak(df0, el.point({u}), 3, default_step(df0, 3));
  FdResult b = fd_Ak(df1, rot.point({u}), 3, default_step(df1, 3));
  CHECK(b.extrapolated.norm2() ==
        Catch::Approx(a.extrapolated.norm2()).epsilon(1e-6));
}

TEST_CASE("step validation") {
  DistanceField df(make_circle(1.0));
  CHECK_THROWS_AS(fd_Ak(df, {1.0, 0.0}, 3, 0.3), StencilError);
  CHECK_THROWS_AS(fd_Ak(df, {1.0, 0.0}, 7, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(fd_Ak(df, {1.0, 0.0}, 1, 1e-3), std::invalid_argument);
}

TEST_CASE("pointwise identity suite") {
  SECTION("ellipse") {
    IdentityReport r = verify_prop1(make_ellipse(2.0, 1.0), 4);
    CHECK(r.grad_is_projection < 1e-4);
    CHECK(r.hessian_is_tangent < 1e-4);
    CHECK(r.b_from_a3 < 1e-4);
    CHECK(r.a3_from_b < 1e-4);
    CHECK(r.trace_is_h < 1e-4);
    CHECK(r.hessian_eta_normal < 1e-6);
  }
  SECTION("torus") {
    IdentityReport r = verify_prop1(make_torus3(2.0, 0.5), 3);
    CHECK(r.grad_is_projection < 1e-4);
    CHECK(r.hessian_is_tangent < 1e-4);
    CHECK(r.b_from_a3 < 1e-4);
    CHECK(r.a3_from_b < 1e-4);
    CHECK(r.trace_is_h < 1e-4);
    CHECK(r.hessian_eta_normal < 1e-6);
  }
  SECTION("plane") {
    IdentityReport r = verify_prop1(make_plane(), 2);
    CHECK(r.grad_is_projection < 1e-8);
    CHECK(r.hessian_is_tangent < 1e-8);
    CHECK(r.b_from_a3 < 1e-8);
    CHECK(r.a3_from_b < 1e-8);
    CHECK(r.trace_is_h < 1e-8);
    CHECK(r.hessian_eta_normal < 1e-8);
  }
}

TEST_CASE("torus second fundamental form from finite differences") {
  Immersion tor = make_torus3(2.0, 0.5);
  DistanceField df(tor);
  JetData jd = jets(tor, {0.4, 1.1}, 1);
  FdResult f3 = fd_Ak(df, jd.point, 3, default_step(df, 3));
  CHECK(f3.observed_order > 2.0);
  // |A^3|^2 = 3 |B|^2 for any shape.
  CHECK(f3.extrapolated.norm2() ==
        Catch::Approx(3.0 * jd.sample.b_norm2()).epsilon(1e-4));
}
