#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "distjet/evaluator.hpp"
#include "distjet/recursion.hpp"

// Plane-curve specialization (n = 1, m = 1). In an adapted frame every jet
// component along a curve is a polynomial in the curvature and its arc-length
// derivatives, so the squared norms collapse to one polynomial per k. The
// flow evaluates these per node instead of assembling full jet arrays.

namespace distjet {

// Polynomial in the curvature jets kappa_0, kappa_1, ... where kappa_l is the
// l-th arc-length derivative of the curvature. Keys are exponent vectors with
// trailing zeros trimmed; coefficients stay exact (small integers).
class PolyScalar {
 public:
  using Terms = std::map<std::vector<int>, double>;

  PolyScalar() = default;

  static PolyScalar constant(double c) {
    PolyScalar p;
    if (c != 0.0) p.terms_[{}] = c;
    return p;
  }

  static PolyScalar variable(int l) {
    PolyScalar p;
    std::vector<int> e(l + 1, 0);
    e[l] = 1;
    p.terms_[std::move(e)] = 1.0;
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  PolyScalar& operator+=(const PolyScalar& o) {
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }
  PolyScalar& operator-=(const PolyScalar& o) {
    for (const auto& [e, c] : o.terms_) add(e, -c);
    return *this;
  }
  friend PolyScalar operator+(PolyScalar a, const PolyScalar& b) { return a += b; }
  friend PolyScalar operator-(PolyScalar a, const PolyScalar& b) { return a -= b; }

  friend PolyScalar operator*(const PolyScalar& a, const PolyScalar& b) {
    PolyScalar r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        std::vector<int> e(std::max(ea.size(), eb.size()), 0);
        for (size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
        for (size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
        r.add(e, ca * cb);
      }
    return r;
  }
  friend PolyScalar operator*(PolyScalar a, double c) {
    if (c == 0.0) return {};
    for (auto& [e, v] : a.terms_) v *= c;
    return a;
  }
  friend PolyScalar operator*(double c, PolyScalar a) { return std::move(a) * c; }
  friend PolyScalar operator-(PolyScalar a) { return std::move(a) * -1.0; }

  // Formal d/ds: each kappa_l differentiates to kappa_{l+1}.
  PolyScalar arc_derivative() const {
    PolyScalar r;
    for (const auto& [e, c] : terms_)
      for (size_t l = 0; l < e.size(); ++l) {
        if (e[l] == 0) continue;
        std::vector<int> d(e);
        if (d.size() < l + 2) d.resize(l + 2, 0);
        d[l] -= 1;
        d[l + 1] += 1;
        r.add(d, c * e[l]);
      }
    return r;
  }

  PolyScalar partial(int l) const {
    PolyScalar r;
    for (const auto& [e, c] : terms_) {
      if ((size_t)l >= e.size() || e[l] == 0) continue;
      std::vector<int> d(e);
      d[l] -= 1;
      r.add(d, c * e[l]);
    }
    return r;
  }

  // Highest jet index appearing with a nonzero exponent; -1 for constants.
  int max_var() const {
    int mv = -1;
    for (const auto& [e, c] : terms_)
      for (size_t l = 0; l < e.size(); ++l)
        if (e[l] != 0) mv = std::max(mv, (int)l);
    return mv;
  }

  double eval(const std::vector<double>& kappa) const {
    double sum = 0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (size_t l = 0; l < e.size(); ++l) {
        if (e[l] == 0) continue;
        if (l >= kappa.size())
          throw std::invalid_argument("PolyScalar::eval: curvature jet list too short");
        for (int i = 0; i < e[l]; ++i) t *= kappa[l];
      }
      sum += t;
    }
    return sum;
  }

 private:
  void add(std::vector<int> e, double c) {
    if (c == 0.0) return;
    while (!e.empty() && e.back() == 0) e.pop_back();
    auto [it, fresh] = terms_.try_emplace(std::move(e), c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  Terms terms_;
};

// Adapted-frame components of the curve's B-jets as curvature-jet polynomials:
// label 0 is the tangent direction, label 1 the normal. The bare form is
// kappa times the normal; each derivative order rotates components through
// T' = kappa N, N' = -kappa T.
struct FrenetJets {
  std::vector<PolyScalar> tangential;  // label-0 component of the order-a jet
  std::vector<PolyScalar> normal;      // label-1 component

  explicit FrenetJets(int a_max) : tangential(a_max + 1), normal(a_max + 1) {
    const PolyScalar kappa = PolyScalar::variable(0);
    normal[0] = kappa;
    for (int a = 0; a < a_max; ++a) {
      normal[a + 1] = normal[a].arc_derivative() + kappa * tangential[a];
      tangential[a + 1] = tangential[a].arc_derivative() - kappa * normal[a];
    }
  }

  const PolyScalar& comp(int a, int lab) const { return lab ? normal[a] : tangential[a]; }
};

// |A^k|^2 along a plane curve as a polynomial in kappa_0..kappa_{k-3}. Same
// contraction walk as the numeric norm at (n, m) = (1, 1): the lone tangent
// index is 0, free labels sit on the normal, and bonds touching a tangent
// slot collapse to the single tangent value.
inline PolyScalar curvature_norm_poly(const RecursionTable& table, int k) {
  if (k < 3) throw std::invalid_argument("curvature_norm_poly: requires k >= 3");
  const NormExpression expr = squared_norm_expr(table, k);
  const FrenetJets fj(k - 3);

  PolyScalar total;
  for (const NormExpression::Part& part : expr.parts) {
    PolyScalar comp;
    for (const Term& t : part.p.terms) {
      const detail::TermPlan tp = detail::plan_term(t, 1, 2);
      std::vector<int> bond(tp.bond_range.size(), 0);
      int slotbuf[16];
      for (bool more = true; more;) {
        PolyScalar prod = PolyScalar::constant(tp.coeff);
        for (const detail::FactorPlan& fp : tp.factors) {
          const int nslots = (int)fp.slots.size();
          for (int s = 0; s < nslots; ++s) {
            const detail::SlotSource& src = fp.slots[s];
            slotbuf[s] = src.kind == detail::SlotSource::kTangent ? 0
                         : src.kind == detail::SlotSource::kLabel ? 1
                                                                  : bond[src.pos];
          }
          if (fp.order == TensorFactor::kKronecker) {
            if (slotbuf[0] != slotbuf[1]) prod = {};
          } else {
            prod = prod * fj.comp(fp.order, slotbuf[nslots - 1]);
          }
          if (prod.is_zero()) break;
        }
        comp += prod;
        more = false;
        for (int b = (int)bond.size() - 1; b >= 0; --b) {
          if (++bond[b] < tp.bond_range[b]) {
            more = true;
            break;
          }
          bond[b] = 0;
        }
      }
    }
    total += comp * comp * (double)part.weight;
  }
  return total;
}

}  // namespace distjet
