#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Pointwise B-jet data in an adapted orthonormal frame: for each derivative
// order a, a dense array over a derivative slots and 2 base slots (tangent
// indices, range n) and one ambient label (range n+m). The label is stored
// full-ambient for every order; bare-B entries with a tangent label are zero
// (the form is normal-valued), which is what makes annihilation automatic in
// numeric contractions.

namespace distjet {

struct JetSample {
  int n = 1;
  int m = 1;
  std::vector<std::vector<double>> jets;  // jets[a], a = 0..a_max

  int ambient() const { return n + m; }
  int a_max() const { return (int)jets.size() - 1; }

  static size_t jet_size(int a, int n, int d) {
    size_t s = d;
    for (int i = 0; i < a + 2; ++i) s *= n;
    return s;
  }

  // slots: a+2 tangent indices (0..n-1) in order, then the ambient label (0..d-1).
  double at(int a, const int* slots) const {
    const int nslots = a + 2;
    size_t idx = 0;
    for (int i = 0; i < nslots; ++i) idx = idx * n + slots[i];
    idx = idx * ambient() + slots[nslots];
    return jets[a][idx];
  }
  double& at_ref(int a, const int* slots) {
    const int nslots = a + 2;
    size_t idx = 0;
    for (int i = 0; i < nslots; ++i) idx = idx * n + slots[i];
    idx = idx * ambient() + slots[nslots];
    return jets[a][idx];
  }

  double b_norm2() const {
    double s = 0;
    for (double v : jets[0]) s += v * v;
    return s;
  }

  JetSample with_zero_derivatives() const {
    JetSample z = *this;
    for (size_t a = 1; a < z.jets.size(); ++a)
      std::fill(z.jets[a].begin(), z.jets[a].end(), 0.0);
    return z;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double uniform_pm1(std::uint64_t& state) {
  return (double)(splitmix64(state) >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace detail

// Synthetic jets: bare B symmetric with normal-only labels and |B| normalized to
// 1; higher jets symmetric in the two base slots, full ambient labels, entries
// uniform in [-1, 1]. The same seed always reproduces the same sample.
inline JetSample random_jets(int n, int m, int a_max, std::uint64_t seed) {
  JetSample js;
  js.n = n;
  js.m = m;
  const int d = n + m;
  std::uint64_t state = seed;
  js.jets.resize(a_max + 1);
  for (int a = 0; a <= a_max; ++a) js.jets[a].assign(JetSample::jet_size(a, n, d), 0.0);

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int lab = n; lab < d; ++lab) {
        const double v = detail::uniform_pm1(state);
        int s0[3] = {i, j, lab};
        int s1[3] = {j, i, lab};
        js.at_ref(0, s0) = v;
        js.at_ref(0, s1) = v;
      }
  const double bn = std::sqrt(js.b_norm2());
  if (bn == 0.0) throw std::logic_error("random_jets: degenerate B");
  for (double& v : js.jets[0]) v /= bn;

  std::vector<int> slots;
  for (int a = 1; a <= a_max; ++a) {
    const int nd = a;  // derivative slots
    slots.assign(a + 3, 0);
    // Iterate derivative-slot tuples, then base pairs i <= j, then labels.
    std::vector<int> der(nd, 0);
    for (bool more = true; more;) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int lab = 0; lab < d; ++lab) {
            const double v = detail::uniform_pm1(state);
            for (int t = 0; t < nd; ++t) slots[t] = der[t];
            slots[nd] = i;
            slots[nd + 1] = j;
            slots[nd + 2] = lab;
            js.at_ref(a, slots.data()) = v;
            std::swap(slots[nd], slots[nd + 1]);
            js.at_ref(a, slots.data()) = v;
          }
      more = false;
      for (int t = nd - 1; t >= 0; --t) {
        if (++der[t] < n) {
          more = true;
          break;
        }
        der[t] = 0;
      }
    }
  }
  return js;
}

// Stream-independent per-sample seed derivation for scans.
inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base + 0x9E3779B97F4A7C15ull * (index + 1);
  return detail::splitmix64(state);
}

}  // namespace distjet
