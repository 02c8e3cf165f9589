#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

// Truncated Taylor arithmetic in one or two variables, used to push analytic
// parametrizations through the geometric pipelines. Coefficients are stored for
// every per-variable degree up to `order`, so each retained coefficient of a
// product or composition is exact (rectangular truncation never contaminates
// kept entries). partial() is exact up to degree order-1 in the differentiated
// variable; callers budget one order per derivative they take.

namespace distjet {

class TaylorScalar {
 public:
  TaylorScalar() : TaylorScalar(1, 0) {}
  TaylorScalar(int nvars, int order)
      : nvars_(nvars), order_(order), c_(size_of(nvars, order), 0.0) {
    assert(nvars == 1 || nvars == 2);
  }

  static TaylorScalar constant(int nvars, int order, double v) {
    TaylorScalar t(nvars, order);
    t.c_[0] = v;
    return t;
  }
  // v0 + tau_i, the i-th variable expanded around v0.
  static TaylorScalar variable(int nvars, int order, int i, double v0) {
    TaylorScalar t(nvars, order);
    t.c_[0] = v0;
    if (order >= 1) t.c_[i == 0 ? t.stride0() : 1] = 1.0;
    return t;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }

  double coeff(int e0, int e1 = 0) const {
    if (e0 > order_ || e1 > order_ || (nvars_ == 1 && e1 != 0)) return 0.0;
    return c_[idx(e0, e1)];
  }
  double& coeff_ref(int e0, int e1 = 0) { return c_[idx(e0, e1)]; }

  // Value of the mixed partial d^{e0+e1} f / d tau_0^{e0} d tau_1^{e1} at 0.
  double derivative(int e0, int e1 = 0) const {
    double f = 1.0;
    for (int i = 2; i <= e0; ++i) f *= i;
    for (int i = 2; i <= e1; ++i) f *= i;
    return coeff(e0, e1) * f;
  }

  TaylorScalar& operator+=(const TaylorScalar& o) {
    check(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TaylorScalar& operator-=(const TaylorScalar& o) {
    check(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TaylorScalar& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

  friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b) { return a += b; }
  friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b) { return a -= b; }
  friend TaylorScalar operator-(TaylorScalar a) { return a *= -1.0; }
  friend TaylorScalar operator*(TaylorScalar a, double s) { return a *= s; }
  friend TaylorScalar operator*(double s, TaylorScalar a) { return a *= s; }
  friend TaylorScalar operator/(TaylorScalar a, double s) { return a *= 1.0 / s; }
  friend TaylorScalar operator+(TaylorScalar a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend TaylorScalar operator+(double s, TaylorScalar a) { return std::move(a) + s; }
  friend TaylorScalar operator-(TaylorScalar a, double s) { return std::move(a) + (-s); }
  friend TaylorScalar operator-(double s, TaylorScalar a) { return -std::move(a) + s; }

  friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
    a.check(b);
    TaylorScalar r(a.nvars_, a.order_);
    const int P = a.order_;
    if (a.nvars_ == 1) {
      for (int i = 0; i <= P; ++i) {
        if (a.c_[i] == 0.0) continue;
        for (int j = 0; i + j <= P; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
      }
    } else {
      const int st = P + 1;
      for (int i0 = 0; i0 <= P; ++i0)
        for (int i1 = 0; i1 <= P; ++i1) {
          const double av = a.c_[i0 * st + i1];
          if (av == 0.0) continue;
          for (int j0 = 0; i0 + j0 <= P; ++j0)
            for (int j1 = 0; i1 + j1 <= P; ++j1)
              r.c_[(i0 + j0) * st + i1 + j1] += av * b.c_[j0 * st + j1];
        }
    }
    return r;
  }

  friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b) {
    return a * recip(b);
  }

  // d/dtau_i as a series; the top degree in tau_i becomes unknown and is zeroed.
  TaylorScalar partial(int i) const {
    TaylorScalar r(nvars_, order_);
    if (nvars_ == 1) {
      for (int e = 0; e < order_; ++e) r.c_[e] = (e + 1) * c_[e + 1];
      return r;
    }
    const int st = order_ + 1;
    for (int e0 = 0; e0 <= order_; ++e0)
      for (int e1 = 0; e1 <= order_; ++e1) {
        if (i == 0 && e0 < order_) r.c_[e0 * st + e1] = (e0 + 1) * c_[(e0 + 1) * st + e1];
        if (i == 1 && e1 < order_) r.c_[e0 * st + e1] = (e1 + 1) * c_[e0 * st + e1 + 1];
      }
    return r;
  }

  friend TaylorScalar recip(const TaylorScalar& a) {
    if (a.c_[0] == 0.0) throw std::domain_error("recip: zero constant term");
    TaylorScalar r = constant(a.nvars_, a.order_, 1.0 / a.c_[0]);
    for (int correct = 1; correct <= a.order_; correct *= 2)
      r = r * (2.0 - a * r);
    return r;
  }

  friend TaylorScalar sqrt(const TaylorScalar& a) {
    if (a.c_[0] <= 0.0) throw std::domain_error("sqrt: nonpositive constant term");
    // Newton on the inverse square root keeps the loop division-free.
    TaylorScalar y = constant(a.nvars_, a.order_, 1.0 / std::sqrt(a.c_[0]));
    for (int correct = 1; correct <= a.order_; correct *= 2)
      y = y * (3.0 - a * y * y) * 0.5;
    return a * y;
  }

  friend TaylorScalar sin(const TaylorScalar& a) { return a.trig(true); }
  friend TaylorScalar cos(const TaylorScalar& a) { return a.trig(false); }

 private:
  static size_t size_of(int nvars, int order) {
    size_t s = order + 1;
    return nvars == 2 ? s * s : s;
  }
  int stride0() const { return nvars_ == 2 ? order_ + 1 : 1; }
  size_t idx(int e0, int e1) const { return nvars_ == 2 ? e0 * (order_ + 1) + e1 : e0; }
  void check(const TaylorScalar& o) const {
    assert(nvars_ == o.nvars_ && order_ == o.order_);
    (void)o;
  }

  // sin/cos around the constant part: power series in the nilpotent remainder.
  TaylorScalar trig(bool want_sin) const {
    TaylorScalar tau = *this;
    const double a0 = tau.c_[0];
    tau.c_[0] = 0.0;
    TaylorScalar even = constant(nvars_, order_, 1.0);  // cos(tau)
    TaylorScalar odd = tau;                             // sin(tau)
    TaylorScalar pw = tau;
    double fact = 1.0;
    for (int j = 2; j <= order_; ++j) {
      pw = pw * tau;
      fact *= j;
      TaylorScalar term = pw * (1.0 / fact);
      const int r = j % 4;
      if (r == 0)
        even += term;
      else if (r == 1)
        odd += term;
      else if (r == 2)
        even -= term;
      else
        odd -= term;
    }
    if (want_sin) return even * std::sin(a0) + odd * std::cos(a0);
    return even * std::cos(a0) - odd * std::sin(a0);
  }

  int nvars_;
  int order_;
  std::vector<double> c_;
};

}  // namespace distjet
