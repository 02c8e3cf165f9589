#include <catch_amalgamated.hpp>

#include <cmath>

#include "distjet/taylor.hpp"

using namespace distjet;
using Catch::Approx;

TEST_CASE("taylor basics") {
  TaylorScalar u = TaylorScalar::variable(1, 4, 0, 0.3);
  CHECK(u.value() == 0.3);
  CHECK(u.coeff(1) == 1.0);
  CHECK((u * u).derivative(2) == Approx(2.0));
  CHECK((u * u * u).derivative(3) == Approx(6.0));
  CHECK((2.0 * u + 1.0).derivative(1) == Approx(2.0));
}

TEST_CASE("taylor trig matches analytic derivatives") {
  const double u0 = 0.7;
  TaylorScalar u = TaylorScalar::variable(1, 6, 0, u0);
  TaylorScalar f = sin(u) * cos(u);  // = sin(2u)/2
  for (int e = 0; e <= 5; ++e) {
    double expected = 0.5 * std::pow(2.0, e) * std::sin(2 * u0 + e * M_PI / 2);
    CHECK(f.derivative(e) == Approx(expected).margin(1e-12));
  }
}

TEST_CASE("taylor reciprocal and sqrt") {
  const double u0 = 0.5;
  TaylorScalar u = TaylorScalar::variable(1, 5, 0, u0);

  TaylorScalar r = recip(1.0 + u * u);
  const double q = 1 + u0 * u0;
  CHECK(r.value() == Approx(1 / q));
  CHECK(r.derivative(1) == Approx(-2 * u0 / (q * q)));
  CHECK(r.derivative(2) == Approx((6 * u0 * u0 - 2) / (q * q * q)));

  TaylorScalar s = sqrt(1.0 + u);
  CHECK(s.value() == Approx(std::sqrt(1.5)));
  CHECK(s.derivative(1) == Approx(0.5 / std::sqrt(1.5)));
  CHECK(s.derivative(2) == Approx(-0.25 * std::pow(1.5, -1.5)));

  TaylorScalar t = sin(u) / cos(u);
  const double sec2 = 1.0 / (std::cos(u0) * std::cos(u0));
  CHECK(t.derivative(1) == Approx(sec2));
  CHECK(t.derivative(2) == Approx(2 * std::tan(u0) * sec2));
}

TEST_CASE("taylor two variables") {
  const double a = 0.2, b = -0.4;
  TaylorScalar x = TaylorScalar::variable(2, 5, 0, a);
  TaylorScalar y = TaylorScalar::variable(2, 5, 1, b);
  TaylorScalar f = sin(x + 2.0 * y);
  CHECK(f.derivative(0, 0) == Approx(std::sin(a + 2 * b)));
  CHECK(f.derivative(1, 0) == Approx(std::cos(a + 2 * b)));
  CHECK(f.derivative(0, 1) == Approx(2 * std::cos(a + 2 * b)));
  CHECK(f.derivative(2, 1) == Approx(-2 * std::cos(a + 2 * b)));
  CHECK(f.derivative(1, 2) == Approx(-4 * std::cos(a + 2 * b)));

  TaylorScalar g = x * x * y;
  CHECK(g.derivative(2, 1) == Approx(2.0));
  CHECK(g.derivative(1, 1) == Approx(2 * a));
}

TEST_CASE("taylor partial is the series derivative") {
  TaylorScalar u = TaylorScalar::variable(1, 6, 0, 1.1);
  TaylorScalar ds = sin(u).partial(0);
  TaylorScalar c = cos(u);
  for (int e = 0; e <= 5; ++e) CHECK(ds.coeff(e) == Approx(c.coeff(e)).margin(1e-14));

  TaylorScalar x = TaylorScalar::variable(2, 4, 0, 0.3);
  TaylorScalar y = TaylorScalar::variable(2, 4, 1, 0.9);
  TaylorScalar h = x * x * y + y * y;
  CHECK(h.partial(1).derivative(1, 0) == Approx(2 * 0.3));
  CHECK(h.partial(1).value() == Approx(0.3 * 0.3 + 2 * 0.9));
}
