#include <catch_amalgamated.hpp>

#include "distjet/poly_io.hpp"
#include "distjet/recursion.hpp"
#include "distjet/tensor_poly.hpp"

using namespace distjet;

namespace {

Term bare_b(Endpoint b0, Endpoint b1, Endpoint lab, Rational c = 1) {
  Term t;
  t.coeff = c;
  t.factors.push_back(bjet_factor(0, {b0, b1, lab}));
  return t;
}

}  // namespace

TEST_CASE("rational arithmetic normalizes") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(3) * Rational(1, 3) == Rational(1));
  CHECK((Rational(1) - Rational(1)).is_zero());
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(1, -2).num() == -1);
  CHECK(factorial(5) == 120);
  CHECK(binomial(4, 2) == 6);
}

TEST_CASE("canonicalize sorts base slots and factor order") {
  // B[i2,i1; j1] == B[i1,i2; j1]
  Term a = bare_b(free_tangent(1), free_tangent(0), free_label(0));
  Term b = bare_b(free_tangent(0), free_tangent(1), free_label(0));
  CHECK(*canonicalize(a) == *canonicalize(b));

  // Factor order is immaterial.
  Term two;
  two.factors.push_back(bjet_factor(0, {free_tangent(2), free_tangent(3), bond(7)}));
  two.factors.push_back(bjet_factor(0, {free_tangent(0), free_tangent(1), bond(7)}));
  Term two_r;
  two_r.factors = {two.factors[1], two.factors[0]};
  CHECK(*canonicalize(two) == *canonicalize(two_r));
}

TEST_CASE("bare-B label against a tangent slot annihilates") {
  // Label of a bare B bonded to a base slot of another B.
  Term t;
  t.factors.push_back(bjet_factor(0, {free_tangent(1), free_tangent(2), bond(0)}));
  t.factors.push_back(bjet_factor(0, {bond(0), free_tangent(0), free_label(0)}));
  CHECK(!canonicalize(t));

  // Label pinned to a free tangent position.
  Term u = bare_b(free_tangent(0), free_tangent(1), free_tangent(2));
  CHECK(!canonicalize(u));

  // Label-label bond between two bare Bs is fine.
  Term v;
  v.factors.push_back(bjet_factor(0, {free_tangent(0), free_tangent(1), bond(3)}));
  v.factors.push_back(bjet_factor(0, {free_tangent(2), free_tangent(3), bond(3)}));
  CHECK(canonicalize(v).has_value());

  // A first-order jet's label may touch tangent slots (ambient-frozen derivative).
  Term w;
  w.factors.push_back(bjet_factor(1, {free_tangent(1), free_tangent(2), free_tangent(3), bond(0)}));
  w.factors.push_back(bjet_factor(0, {bond(0), free_tangent(0), free_label(0)}));
  CHECK(canonicalize(w).has_value());
}

TEST_CASE("bonded delta reroutes") {
  Term t;
  t.factors.push_back(kronecker_factor(free_tangent(1), bond(0)));
  t.factors.push_back(bjet_factor(0, {bond(0), free_tangent(0), free_label(0)}));
  Term expect = bare_b(free_tangent(0), free_tangent(1), free_label(0));
  CHECK(*canonicalize(t) == *canonicalize(expect));
}

TEST_CASE("make_poly merges and cancels") {
  Term a = bare_b(free_tangent(0), free_tangent(1), free_label(0));
  Term b = bare_b(free_tangent(1), free_tangent(0), free_label(0));
  PolyTensor sum = make_poly(3, 2, 1, {a, b});
  REQUIRE(sum.terms.size() == 1);
  CHECK(sum.terms[0].coeff == Rational(2));

  Term c = bare_b(free_tangent(0), free_tangent(1), free_label(0), -1);
  CHECK(make_poly(3, 2, 1, {a, c}).is_zero());
}

TEST_CASE("formal derivative") {
  RecursionTable t = base_table();

  SECTION("of the metric is zero") {
    CHECK(formal_derivative(t.at(2, 2)).is_zero());
  }
  SECTION("of B is the first jet") {
    PolyTensor b = make_poly(3, 2, 1, {bare_b(free_tangent(0), free_tangent(1), free_label(0))});
    PolyTensor db = formal_derivative(b);
    REQUIRE(db.terms.size() == 1);
    const TensorFactor& f = db.terms[0].factors.at(0);
    CHECK(f.order == 1);
    CHECK(f.ends[0] == free_tangent(0));   // new derivative slot
    CHECK(f.ends[1] == free_tangent(1));   // shifted bases
    CHECK(f.ends[2] == free_tangent(2));
    CHECK(f.ends[3] == free_label(0));
  }
  SECTION("of a two-factor product gives two terms") {
    Term bb;
    bb.factors.push_back(bjet_factor(0, {free_tangent(0), free_tangent(1), bond(0)}));
    bb.factors.push_back(bjet_factor(0, {free_tangent(2), free_tangent(3), bond(0)}));
    PolyTensor p = make_poly(4, 4, 0, {bb});
    PolyTensor dp = formal_derivative(p);
    REQUIRE(dp.terms.size() == 2);
    for (const Term& term : dp.terms) {
      int njet1 = 0;
      for (const TensorFactor& f : term.factors) njet1 += f.order == 1;
      CHECK(njet1 == 1);
    }
  }
}

TEST_CASE("golden row three") {
  RecursionTable t = filled_table(3);

  PolyTensor expect_b =
      make_poly(3, 2, 1, {bare_b(free_tangent(0), free_tangent(1), free_label(0))});
  CHECK(t.at(3, 2) == expect_b);
  CHECK(t.at(3, 3).is_zero());
  CHECK(t.at(3, 0).is_zero());
  CHECK(t.at(3, 1).is_zero());
}

TEST_CASE("golden row four") {
  RecursionTable t = filled_table(4);

  SECTION("(4,2) is the two-label chain") {
    std::vector<Term> raw;
    for (int swap = 0; swap < 2; ++swap) {
      Term term;
      term.factors.push_back(
          bjet_factor(0, {free_tangent(0), bond(0), free_label(swap ? 1 : 0)}));
      term.factors.push_back(
          bjet_factor(0, {bond(0), free_tangent(1), free_label(swap ? 0 : 1)}));
      raw.push_back(term);
    }
    CHECK(t.at(4, 2) == make_poly(4, 2, 2, std::move(raw)));
  }

  SECTION("(4,3) is the first jet alone") {
    Term djet;
    djet.factors.push_back(bjet_factor(
        1, {free_tangent(0), free_tangent(1), free_tangent(2), free_label(0)}));
    CHECK(t.at(4, 3) == make_poly(4, 3, 1, {djet}));
  }

  SECTION("(4,4) is minus the three pairings of label-bonded B.B") {
    std::vector<Term> raw;
    const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    for (auto& pr : pairings) {
      Term term;
      term.coeff = -1;
      term.factors.push_back(
          bjet_factor(0, {free_tangent(pr[0]), free_tangent(pr[1]), bond(0)}));
      term.factors.push_back(
          bjet_factor(0, {free_tangent(pr[2]), free_tangent(pr[3]), bond(0)}));
      raw.push_back(term);
    }
    CHECK(t.at(4, 4) == make_poly(4, 4, 0, std::move(raw)));
  }
}

TEST_CASE("text dump format") {
  RecursionTable t = filled_table(4);
  CHECK(to_text(t.at(3, 2)) == "1 * B[i1,i2; j1]\n");
  CHECK(to_text(t.at(5 - 2, 3)) == "0\n");
  CHECK(to_text(t.at(4, 3)) == "1 * D1B[i1,i2,i3; j1]\n");
  std::string p44 = to_text(t.at(4, 4));
  CHECK(p44.find("-1 * B[") != std::string::npos);
  CHECK(std::count(p44.begin(), p44.end(), '\n') == 3);

  auto j = to_json(t.at(4, 2));
  CHECK(j["k"] == 4);
  CHECK(j["s"] == 2);
  CHECK(j["terms"].size() == 2);
  CHECK(j["terms"][0]["factors"][0]["order"] == 0);
}
