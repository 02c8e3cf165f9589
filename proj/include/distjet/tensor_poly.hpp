#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "distjet/rational.hpp"

// Symbolic tensor polynomials in the second fundamental form and its covariant
// derivatives.
//
// A Term is a product of factors, each either
//   * a B-jet of order a >= 0: slots are [d_1 .. d_a | b_1 b_2 ; label], where the
//     d_* are derivative slots (tangent), b_1 b_2 the two symmetric base slots
//     (tangent) and `label` the ambient component index, or
//   * a Kronecker delta with two tangent slots (the induced metric in an
//     orthonormal frame).
// Every slot either carries a free index (a numbered tangent position or label
// position of the enclosing PolyTensor) or one half of a contraction bond.
//
// Conventions baked into canonical forms:
//   * the two base slots of a B-jet commute; derivative slots do not (no attempt
//     is made to use Ricci-type identities, equality of reorderings is left to
//     numerical evaluation);
//   * a bare B (order 0) is normal-valued: a term dies if its label is contracted
//     against a tangent slot or pinned to a free tangent position. Higher jets
//     keep full ambient labels, since differentiation is done with the ambient
//     component frozen, so no such cancellation applies to them;
//   * a delta bonded to anything is eliminated by rerouting the bond.
// Canonical form = the lexicographically least flat encoding over all factor
// reorderings (within equal (kind, order) groups) and base-slot swaps, with bond
// ids renumbered by first use. Identical canonical terms merge by adding
// coefficients; zero coefficients drop.

namespace distjet {

enum class EndKind : std::uint8_t { FreeTangent, FreeLabel, Bond };

struct Endpoint {
  EndKind kind = EndKind::Bond;
  int index = 0;  // free position (0-based) or bond id

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

inline Endpoint free_tangent(int pos) { return {EndKind::FreeTangent, pos}; }
inline Endpoint free_label(int pos) { return {EndKind::FreeLabel, pos}; }
inline Endpoint bond(int id) { return {EndKind::Bond, id}; }

struct TensorFactor {
  static constexpr int kKronecker = -1;

  int order = 0;  // slots: deriv 0..order-1, base order..order+1, label order+2
  std::vector<Endpoint> ends;

  bool is_kronecker() const { return order == kKronecker; }
  int slot_count() const { return is_kronecker() ? 2 : order + 3; }
  bool slot_is_label(int s) const { return !is_kronecker() && s == order + 2; }

  friend bool operator==(const TensorFactor&, const TensorFactor&) = default;
};

inline TensorFactor bjet_factor(int order, std::vector<Endpoint> ends) {
  TensorFactor f;
  f.order = order;
  f.ends = std::move(ends);
  if ((int)f.ends.size() != order + 3) throw std::invalid_argument("bjet_factor: bad slot count");
  return f;
}

inline TensorFactor kronecker_factor(Endpoint a, Endpoint b) {
  TensorFactor f;
  f.order = TensorFactor::kKronecker;
  f.ends = {a, b};
  return f;
}

struct Term {
  Rational coeff = 1;
  std::vector<TensorFactor> factors;

  friend bool operator==(const Term&, const Term&) = default;
};

namespace detail {

// Flat encoding of a term under a fixed factor order and per-factor base
// orientation; bonds numbered in order of first appearance.
inline void encode_term(const Term& t, const std::vector<int>& order,
                        const std::vector<char>& swap_base, std::vector<int>& out) {
  out.clear();
  std::map<int, int> bond_ids;
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const TensorFactor& f = t.factors[order[oi]];
    out.push_back(f.order);
    const int n = f.slot_count();
    for (int s = 0; s < n; ++s) {
      int slot = s;
      if (f.is_kronecker()) {
        if (swap_base[oi]) slot = 1 - s;
      } else if (s == f.order || s == f.order + 1) {
        if (swap_base[oi]) slot = f.order + (f.order + 1 - s);
      }
      const Endpoint& e = f.ends[slot];
      switch (e.kind) {
        case EndKind::FreeTangent:
          out.push_back(1000 + e.index);
          break;
        case EndKind::FreeLabel:
          out.push_back(2000 + e.index);
          break;
        case EndKind::Bond: {
          auto [it, fresh] = bond_ids.try_emplace(e.index, (int)bond_ids.size());
          out.push_back(3000 + it->second);
          break;
        }
      }
    }
  }
}

inline bool endpoint_is_tangent_slot(const TensorFactor& f, int slot) {
  return f.is_kronecker() || !f.slot_is_label(slot);
}

}  // namespace detail

// Canonicalize one term. Returns nullopt when the term is identically zero
// (annihilated bare-B label or zero coefficient).
inline std::optional<Term> canonicalize(Term t) {
  if (t.coeff.is_zero()) return std::nullopt;

  // Index bond endpoints: id -> list of (factor, slot).
  auto bond_map = [&t]() {
    std::map<int, std::vector<std::pair<int, int>>> m;
    for (int fi = 0; fi < (int)t.factors.size(); ++fi)
      for (int s = 0; s < t.factors[fi].slot_count(); ++s)
        if (t.factors[fi].ends[s].kind == EndKind::Bond)
          m[t.factors[fi].ends[s].index].push_back({fi, s});
    return m;
  };

  for (auto& [id, ends] : bond_map())
    if (ends.size() != 2) throw std::logic_error("canonicalize: dangling bond");

  // Eliminate bonded deltas: delta_{ab} X_b = X_a.
  for (bool changed = true; changed;) {
    changed = false;
    for (int fi = 0; fi < (int)t.factors.size() && !changed; ++fi) {
      const TensorFactor& f = t.factors[fi];
      if (!f.is_kronecker()) continue;
      for (int s = 0; s < 2; ++s) {
        if (f.ends[s].kind != EndKind::Bond) continue;
        const int id = f.ends[s].index;
        Endpoint other = f.ends[1 - s];
        if (other.kind == EndKind::Bond && other.index == id)
          throw std::logic_error("canonicalize: delta self-trace");
        // Reroute the partner endpoint to the delta's other slot target.
        auto ends = bond_map()[id];
        auto partner = ends[0] == std::pair{fi, s} ? ends[1] : ends[0];
        t.factors[partner.first].ends[partner.second] = other;
        t.factors.erase(t.factors.begin() + fi);
        changed = true;
        break;
      }
    }
  }

  // Bare-B annihilation: normal-valued label against anything tangent.
  auto bonds = bond_map();
  for (const TensorFactor& f : t.factors) {
    if (f.is_kronecker() || f.order != 0) continue;
    const Endpoint& lab = f.ends[2];
    if (lab.kind == EndKind::FreeTangent) return std::nullopt;
    if (lab.kind == EndKind::Bond) {
      for (auto [fi, s] : bonds[lab.index])
        if (detail::endpoint_is_tangent_slot(t.factors[fi], s)) return std::nullopt;
    }
  }

  if (t.factors.empty()) throw std::logic_error("canonicalize: empty factor list");

  // Sort factors by (order) so permutations only range over equal groups.
  std::vector<int> base_order(t.factors.size());
  for (size_t i = 0; i < base_order.size(); ++i) base_order[i] = (int)i;
  std::stable_sort(base_order.begin(), base_order.end(),
                   [&](int a, int b) { return t.factors[a].order < t.factors[b].order; });

  std::vector<std::pair<size_t, size_t>> groups;  // [begin, end) in base_order
  for (size_t i = 0; i < base_order.size();) {
    size_t j = i;
    while (j < base_order.size() &&
           t.factors[base_order[j]].order == t.factors[base_order[i]].order)
      ++j;
    groups.push_back({i, j});
    i = j;
  }

  std::vector<int> perm = base_order;
  std::vector<char> swaps(t.factors.size(), 0);
  std::vector<int> best, cur;
  std::vector<int> best_perm;
  std::vector<char> best_swaps;

  // Enumerate permutations within groups (odometer over per-group permutations)
  // and all base-slot orientations; keep the least encoding.
  std::vector<std::vector<int>> group_perms;
  for (auto [b, e] : groups) {
    std::vector<int> g(perm.begin() + b, perm.begin() + e);
    std::sort(g.begin(), g.end());
    group_perms.push_back(g);
  }
  auto for_each_perm = [&](auto&& self, size_t gi) -> void {
    if (gi == groups.size()) {
      const size_t nf = t.factors.size();
      for (std::uint32_t mask = 0; mask < (1u << nf); ++mask) {
        for (size_t i = 0; i < nf; ++i) swaps[i] = (mask >> i) & 1;
        detail::encode_term(t, perm, swaps, cur);
        if (best.empty() || cur < best) {
          best = cur;
          best_perm = perm;
          best_swaps = swaps;
        }
      }
      return;
    }
    auto [b, e] = groups[gi];
    std::vector<int>& g = group_perms[gi];
    do {
      std::copy(g.begin(), g.end(), perm.begin() + b);
      self(self, gi + 1);
    } while (std::next_permutation(g.begin(), g.end()));
  };
  for_each_perm(for_each_perm, 0);

  // Materialize the canonical arrangement.
  Term out;
  out.coeff = t.coeff;
  std::map<int, int> bond_renum;
  for (size_t oi = 0; oi < best_perm.size(); ++oi) {
    TensorFactor f = t.factors[best_perm[oi]];
    if (best_swaps[oi]) {
      if (f.is_kronecker())
        std::swap(f.ends[0], f.ends[1]);
      else
        std::swap(f.ends[f.order], f.ends[f.order + 1]);
    }
    for (Endpoint& e : f.ends)
      if (e.kind == EndKind::Bond) {
        auto [it, fresh] = bond_renum.try_emplace(e.index, (int)bond_renum.size());
        e.index = it->second;
      }
    out.factors.push_back(std::move(f));
  }
  return out;
}

// A tensor-valued polynomial: `s` free tangent positions and `labels` free label
// positions (labels == k - s except for label-specialized tensors).
struct PolyTensor {
  int k = 0;
  int s = 0;
  int labels = 0;
  std::vector<Term> terms;  // canonical, sorted

  bool is_zero() const { return terms.empty(); }

  friend bool operator==(const PolyTensor&, const PolyTensor&) = default;
};

// Merge a raw term list into canonical form.
inline PolyTensor make_poly(int k, int s, int labels, std::vector<Term> raw) {
  PolyTensor p;
  p.k = k;
  p.s = s;
  p.labels = labels;
  std::map<std::vector<int>, Term> merged;
  std::vector<int> key;
  for (Term& r : raw) {
    std::optional<Term> c = canonicalize(std::move(r));
    if (!c) continue;
    std::vector<int> id_order(c->factors.size());
    for (size_t i = 0; i < id_order.size(); ++i) id_order[i] = (int)i;
    std::vector<char> no_swaps(c->factors.size(), 0);
    detail::encode_term(*c, id_order, no_swaps, key);
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(key, std::move(*c));
    else
      it->second.coeff += c->coeff;
  }
  for (auto& [kk, term] : merged)
    if (!term.coeff.is_zero()) p.terms.push_back(std::move(term));
  return p;
}

inline PolyTensor zero_poly(int k, int s, int labels) { return make_poly(k, s, labels, {}); }

// d/ds with the ambient label frozen: Leibniz over B-jet factors, each bumped one
// derivative order with the new slot (mapped to the new leading tangent position 0)
// inserted in front; deltas are parallel and contribute nothing. All existing free
// tangent positions shift up by one.
inline PolyTensor formal_derivative(const PolyTensor& p) {
  std::vector<Term> out;
  for (const Term& t : p.terms) {
    for (size_t fi = 0; fi < t.factors.size(); ++fi) {
      if (t.factors[fi].is_kronecker()) continue;
      Term d = t;
      for (TensorFactor& f : d.factors)
        for (Endpoint& e : f.ends)
          if (e.kind == EndKind::FreeTangent) ++e.index;
      TensorFactor& f = d.factors[fi];
      ++f.order;
      f.ends.insert(f.ends.begin(), free_tangent(0));
      out.push_back(std::move(d));
    }
  }
  return make_poly(p.k, p.s + 1, p.labels, std::move(out));
}

}  // namespace distjet
