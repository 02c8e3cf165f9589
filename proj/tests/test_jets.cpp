#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "distjet/jets.hpp"

using namespace distjet;
using Catch::Approx;

namespace {

double frame_gram_error(const JetData& jd) {
  const int d = jd.frame.size();
  double worst = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double dot = 0;
      for (int al = 0; al < d; ++al) dot += jd.frame[i][al] * jd.frame[j][al];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

// Ambient vector B(e_i, e_j) reconstructed from adapted components.
std::vector<double> b_ambient(const JetData& jd, int i, int j) {
  const int d = jd.frame.size();
  std::vector<double> v(d, 0.0);
  for (int beta = 0; beta < d; ++beta) {
    int s[3] = {i, j, beta};
    const double comp = jd.sample.at(0, s);
    for (int al = 0; al < d; ++al) v[al] += comp * jd.frame[beta][al];
  }
  return v;
}

}  // namespace

TEST_CASE("circle jets") {
  const double R = 2.0;
  Immersion im = make_circle(R);
  JetData jd = jets(im, {0.7}, 3);

  CHECK(frame_gram_error(jd) < 1e-10);
  CHECK(jd.metric[0] == Approx(R * R));

  // Normal-valued: tangent-label component of bare B vanishes.
  int st[3] = {0, 0, 0};
  CHECK(std::abs(jd.sample.at(0, st)) < 1e-10);

  // B(e,e) = -(1/R) * outward unit radial.
  std::vector<double> b = b_ambient(jd, 0, 0);
  const double cx = std::cos(0.7), sx = std::sin(0.7);
  CHECK(b[0] == Approx(-cx / R).margin(1e-10));
  CHECK(b[1] == Approx(-sx / R).margin(1e-10));
  CHECK(jd.sample.b_norm2() == Approx(1.0 / (R * R)));

  // Mean curvature vector equals B(e,e) for a curve.
  double h_amb0 = 0, h_amb1 = 0;
  for (int beta = 0; beta < 2; ++beta) {
    h_amb0 += jd.mean_curvature[beta] * jd.frame[beta][0];
    h_amb1 += jd.mean_curvature[beta] * jd.frame[beta][1];
  }
  CHECK(h_amb0 == Approx(b[0]).margin(1e-12));
  CHECK(h_amb1 == Approx(b[1]).margin(1e-12));

  // Ambient-frozen first jet on a circle: tangent-label component -1/R^2,
  // normal-label component 0 (the frame rotates, the strength is constant).
  int d1t[4] = {0, 0, 0, 0};
  int d1n[4] = {0, 0, 0, 1};
  CHECK(jd.sample.at(1, d1t) == Approx(-1.0 / (R * R)).margin(1e-10));
  CHECK(std::abs(jd.sample.at(1, d1n)) < 1e-10);

  // Second jet: |normal comp| = 1/R^3 and opposite in sign to the bare form.
  int d2n[5] = {0, 0, 0, 0, 1};
  int bn[3] = {0, 0, 1};
  const double f0 = jd.sample.at(0, bn);
  const double f2 = jd.sample.at(2, d2n);
  CHECK(std::abs(f2) == Approx(1.0 / (R * R * R)).margin(1e-9));
  CHECK(f0 * f2 == Approx(-1.0 / (R * R * R * R)).margin(1e-9));
}

TEST_CASE("ellipse jets validated against finite differences") {
  Immersion im = make_ellipse(2.0, 1.0);
  for (double u0 : {0.0, 0.4, 1.3, 2.9}) {
    JetData jd = jets(im, {u0}, 2);
    CHECK(frame_gram_error(jd) < 1e-10);

    // FD second derivative of the chart, projected off the tangent.
    const double h = 1e-5;
    auto pt = [&](double u) { return im.point({u}); };
    std::vector<double> xp = pt(u0 + h), xm = pt(u0 - h), xc = pt(u0);
    std::vector<double> d2(2), d1(2);
    for (int al = 0; al < 2; ++al) {
      d2[al] = (xp[al] - 2 * xc[al] + xm[al]) / (h * h);
      d1[al] = (xp[al] - xm[al]) / (2 * h);
    }
    const double t2 = d1[0] * d1[0] + d1[1] * d1[1];
    double dot = d2[0] * d1[0] + d2[1] * d1[1];
    std::vector<double> b_fd(2);
    for (int al = 0; al < 2; ++al) b_fd[al] = d2[al] - dot / t2 * d1[al];

    // jets() gives B(e,e); scale by |x'|^2 to compare with B(x', x').
    std::vector<double> b = b_ambient(jd, 0, 0);
    CHECK(b[0] * t2 == Approx(b_fd[0]).margin(1e-5));
    CHECK(b[1] * t2 == Approx(b_fd[1]).margin(1e-5));
  }
}

TEST_CASE("torus outer equator principal curvatures") {
  const double R = 2.0, r = 0.5;
  Immersion im = make_torus3(R, r);
  JetData jd = jets(im, {0.9, 0.0}, 1);

  CHECK(frame_gram_error(jd) < 1e-10);
  // Scalar second fundamental form w.r.t. the single normal (label 2).
  double s11, s12, s22;
  {
    int a[3] = {0, 0, 2}, bm[3] = {0, 1, 2}, c[3] = {1, 1, 2};
    s11 = jd.sample.at(0, a);
    s12 = jd.sample.at(0, bm);
    s22 = jd.sample.at(0, c);
  }
  const double tr = s11 + s22, det = s11 * s22 - s12 * s12;
  const double disc = std::sqrt(tr * tr / 4 - det);
  double l1 = std::abs(tr / 2 + disc), l2 = std::abs(tr / 2 - disc);
  if (l1 > l2) std::swap(l1, l2);
  CHECK(l1 == Approx(1.0 / (R + r)).margin(1e-9));
  CHECK(l2 == Approx(1.0 / r).margin(1e-9));

  // Symmetric in the two base slots, normal-valued.
  int p[3] = {0, 1, 2}, q[3] = {1, 0, 2}, t[3] = {0, 1, 0};
  CHECK(jd.sample.at(0, p) == Approx(jd.sample.at(0, q)).margin(1e-12));
  CHECK(std::abs(jd.sample.at(0, t)) < 1e-10);
}

TEST_CASE("clifford torus jets") {
  const double R = 1.3;
  Immersion im = make_clifford4(R);
  JetData jd = jets(im, {0.8, 2.1}, 2);

  CHECK(frame_gram_error(jd) < 1e-10);
  CHECK(jd.sample.b_norm2() == Approx(2.0 / (R * R)).margin(1e-10));

  // Parallel second fundamental form: the normal-bundle derivative vanishes, so
  // the ambient-frozen first jet reduces to its Weingarten (tangential) part,
  //   D1B(c; a,b)^t = -sum_nu B^nu_ab B^nu_ct,   D1B(c; a,b)^nu = 0.
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int lab = 0; lab < 4; ++lab) {
          int s[4] = {c, a, b, lab};
          const double got = jd.sample.at(1, s);
          if (lab >= 2) {
            CHECK(std::abs(got) < 1e-9);
          } else {
            double expect = 0;
            for (int nu = 2; nu < 4; ++nu) {
              int p[3] = {a, b, nu}, q[3] = {c, lab, nu};
              expect -= jd.sample.at(0, p) * jd.sample.at(0, q);
            }
            CHECK(got == Approx(expect).margin(1e-9));
          }
        }

  // Homogeneous: same norms at another point.
  JetData jd2 = jets(im, {2.5, 0.3}, 1);
  CHECK(jd2.sample.b_norm2() == Approx(jd.sample.b_norm2()).margin(1e-12));
}

TEST_CASE("flat shapes carry no second fundamental form") {
  for (const Immersion& im : {make_line(), make_plane()}) {
    std::vector<double> u0(im.n, 0.37);
    JetData jd = jets(im, u0, 2);
    for (const auto& jet : jd.sample.jets)
      for (double v : jet) CHECK(std::abs(v) < 1e-12);
    for (double v : jd.mean_curvature) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("rotation moves the point but not the invariants") {
  Immersion base = make_ellipse(2.0, 1.0);
  Immersion rot = rotated(base, givens_rotation(2, 0, 1, 0.83));
  JetData a = jets(base, {1.1}, 1);
  JetData b = jets(rot, {1.1}, 1);
  CHECK(a.sample.b_norm2() == Approx(b.sample.b_norm2()).margin(1e-12));
  CHECK(a.metric[0] == Approx(b.metric[0]).margin(1e-12));
  const double c = std::cos(0.83), s = std::sin(0.83);
  CHECK(b.point[0] == Approx(c * a.point[0] - s * a.point[1]).margin(1e-12));
  CHECK(b.point[1] == Approx(s * a.point[0] + c * a.point[1]).margin(1e-12));
}

TEST_CASE("shape parsing") {
  CHECK(parse_shape("circle:R=3").tube == Approx(1.5));
  CHECK(parse_shape("ellipse:a=2,b=1").n == 1);
  CHECK(parse_shape("torus3:R=2,r=0.5").d() == 3);
  CHECK(parse_shape("clifford4:R=1").m == 2);
  CHECK(parse_shape("plane").periodic == false);
  CHECK_THROWS_AS(parse_shape("moebius"), std::invalid_argument);
  CHECK_THROWS_AS(parse_shape("circle:R"), std::invalid_argument);
}
