#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "distjet/tensor_poly.hpp"

// Recursion table for the symmetric-tensor coefficients p^{k,s} of the k-th
// derivative of the half squared-norm minus squared-distance potential, evaluated
// on s tangent and k-s normal arguments. Base row (k=2): p^{2,2} = delta,
// p^{2,1} = p^{2,0} = 0. Row k+1 is assembled from row k by differentiating once
// and trading the new argument's ambient derivative for second-fundamental-form
// corrections; concretely, for s tangent slots i_0..i_{s-1} and labels
// j_1..j_{k+1-s},
//
//   p^{k+1,s} =  (grad p^{k,s-1})_{i0,...}
//              - sum_h p^{k,s-1}[j_h -> r] B^{j_h}_{r i0}      (label-tangent bond)
//              - sum_h p^{k,s-2}[extra first label r] B^r_{i0 i_h}   (label-label)
//              + sum_h p^{k,s}[last tangent -> r] B^{j_h}_{r i0}   (tangent-tangent)
//
// where the first two sums run over the labels and the third over the old tangent
// slots. The top case s = k+1 is the same formula with the label sums empty and
// without the p^{k,s} group (it does not exist); the gradient of p^{k,k} stays.

namespace distjet {

struct RecursionTable {
  int max_k = 0;
  std::map<std::pair<int, int>, PolyTensor> entries;

  const PolyTensor& at(int k, int s) const {
    auto it = entries.find({k, s});
    if (it == entries.end()) throw std::out_of_range("RecursionTable: entry not built");
    return it->second;
  }
  bool has(int k, int s) const { return entries.count({k, s}) != 0; }
};

inline RecursionTable base_table() {
  RecursionTable t;
  t.max_k = 2;
  t.entries[{2, 0}] = zero_poly(2, 0, 2);
  t.entries[{2, 1}] = zero_poly(2, 1, 1);
  Term delta;
  delta.coeff = 1;
  delta.factors.push_back(kronecker_factor(free_tangent(0), free_tangent(1)));
  t.entries[{2, 2}] = make_poly(2, 2, 0, {delta});
  return t;
}

namespace detail {

// Helpers below rewire a copy of each term of the input entry and append the new
// bare-B factor. Free-position maps are applied to the existing endpoints first.

inline void remap_free(Term& t, const std::vector<int>& tangent_map,
                       const std::vector<int>& label_map, int bond_mark,
                       int bonded_tangent_pos = -1, int bonded_label_pos = -1) {
  for (TensorFactor& f : t.factors)
    for (Endpoint& e : f.ends) {
      if (e.kind == EndKind::FreeTangent) {
        if (e.index == bonded_tangent_pos)
          e = bond(bond_mark);
        else
          e = free_tangent(tangent_map[e.index]);
      } else if (e.kind == EndKind::FreeLabel) {
        if (e.index == bonded_label_pos)
          e = bond(bond_mark);
        else
          e = free_label(label_map[e.index]);
      }
    }
}

inline int fresh_bond_id(const Term& t) {
  int id = 0;
  for (const TensorFactor& f : t.factors)
    for (const Endpoint& e : f.ends)
      if (e.kind == EndKind::Bond) id = std::max(id, e.index + 1);
  return id;
}

}  // namespace detail

// Build row k_new from row k_new-1; returns an extended copy of the table.
inline RecursionTable extend(const RecursionTable& table, int k_new) {
  if (k_new != table.max_k + 1)
    throw std::invalid_argument("extend: rows must be built incrementally");
  const int k = k_new - 1;
  for (int s = 0; s <= k; ++s)
    if (!table.has(k, s)) throw std::invalid_argument("extend: previous row incomplete");

  RecursionTable out = table;
  out.max_k = k_new;
  out.entries[{k_new, 0}] = zero_poly(k_new, 0, k_new);
  out.entries[{k_new, 1}] = zero_poly(k_new, 1, k_new - 1);

  for (int s = 2; s <= k_new; ++s) {
    const int nlab = k_new - s;
    std::vector<Term> raw;

    // Group 1: gradient of p^{k,s-1}; new tangent position 0, labels unchanged.
    {
      PolyTensor d = formal_derivative(table.at(k, s - 1));
      for (Term& t : d.terms) raw.push_back(std::move(t));
    }

    // Group 2: bond label h of p^{k,s-1} to a base slot of a new bare B whose
    // label takes over position h; sign -1.
    for (int h = 0; h < nlab; ++h) {
      for (Term t : table.at(k, s - 1).terms) {
        const int b = detail::fresh_bond_id(t);
        std::vector<int> tmap(s - 1), lmap(nlab);
        for (int i = 0; i < s - 1; ++i) tmap[i] = i + 1;
        for (int l = 0; l < nlab; ++l) lmap[l] = l;
        detail::remap_free(t, tmap, lmap, b, -1, h);
        t.factors.push_back(bjet_factor(0, {bond(b), free_tangent(0), free_label(h)}));
        t.coeff = -t.coeff;
        raw.push_back(std::move(t));
      }
    }

    // Group 3: p^{k,s-2} with a fresh leading label bonded to the label of a new
    // bare B sitting on tangent positions (0, h); sign -1.
    if (s >= 2) {
      for (int h = 1; h <= s - 1; ++h) {
        for (Term t : table.at(k, s - 2).terms) {
          const int b = detail::fresh_bond_id(t);
          std::vector<int> tmap(s - 2), lmap(nlab + 1);
          for (int i = 0; i < s - 2; ++i) tmap[i] = i + 1 < h ? i + 1 : i + 2;
          lmap[0] = -1;  // bonded below
          for (int l = 1; l <= nlab; ++l) lmap[l] = l - 1;
          detail::remap_free(t, tmap, lmap, b, -1, 0);
          t.factors.push_back(bjet_factor(0, {free_tangent(0), free_tangent(h), bond(b)}));
          t.coeff = -t.coeff;
          raw.push_back(std::move(t));
        }
      }
    }

    // Group 4: bond the last tangent slot of p^{k,s} to a new bare B carrying
    // label h; sign +1. Exists only while s <= k.
    if (s <= k) {
      for (int h = 0; h < nlab; ++h) {
        for (Term t : table.at(k, s).terms) {
          const int b = detail::fresh_bond_id(t);
          std::vector<int> tmap(s), lmap(nlab - 1);
          for (int i = 0; i < s - 1; ++i) tmap[i] = i + 1;
          tmap[s - 1] = -1;  // bonded below
          for (int l = 0; l < nlab - 1; ++l) lmap[l] = l < h ? l : l + 1;
          detail::remap_free(t, tmap, lmap, b, s - 1, -1);
          t.factors.push_back(bjet_factor(0, {bond(b), free_tangent(0), free_label(h)}));
          raw.push_back(std::move(t));
        }
      }
    }

    out.entries[{k_new, s}] = make_poly(k_new, s, nlab, std::move(raw));
  }
  return out;
}

inline RecursionTable filled_table(int k_max) {
  RecursionTable t = base_table();
  for (int k = 3; k <= k_max; ++k) t = extend(t, k);
  return t;
}

// The top-derivative part of p^{k,k-1}: all terms containing a jet of order k-3.
inline PolyTensor leading_term(const RecursionTable& table, int k) {
  if (k < 3) throw std::invalid_argument("leading_term: k >= 3");
  const PolyTensor& p = table.at(k, k - 1);
  PolyTensor out;
  out.k = p.k;
  out.s = p.s;
  out.labels = p.labels;
  for (const Term& t : p.terms)
    for (const TensorFactor& f : t.factors)
      if (!f.is_kronecker() && f.order == k - 3) {
        out.terms.push_back(t);
        break;
      }
  return out;
}

// Closed-form equal-label slice of p^{k,2}: (k-2)! times the chain
// B_{i0 r1} B_{r1 r2} ... B_{r_{k-3} i1} with every label equal to the single
// free label. For k = 2 the empty chain is the metric delta.
inline PolyTensor chain_power_p_k2(int k) {
  if (k < 2) throw std::invalid_argument("chain_power_p_k2: k >= 2");
  if (k == 2) {
    Term delta;
    delta.factors.push_back(kronecker_factor(free_tangent(0), free_tangent(1)));
    return make_poly(2, 2, 0, {delta});
  }
  Term t;
  t.coeff = factorial(k - 2);
  const int links = k - 2;
  for (int i = 0; i < links; ++i) {
    Endpoint left = i == 0 ? free_tangent(0) : bond(i - 1);
    Endpoint right = i == links - 1 ? free_tangent(1) : bond(i);
    t.factors.push_back(bjet_factor(0, {left, right, free_label(0)}));
  }
  return make_poly(k, 2, 1, {t});
}

// Collapse all free labels onto label position 0 (for comparing a table entry
// against the equal-label chain above).
inline PolyTensor specialize_labels_equal(const PolyTensor& p) {
  std::vector<Term> raw = p.terms;
  for (Term& t : raw)
    for (TensorFactor& f : t.factors)
      for (Endpoint& e : f.ends)
        if (e.kind == EndKind::FreeLabel) e.index = 0;
  return make_poly(p.k, p.s, p.labels > 0 ? 1 : 0, std::move(raw));
}

// |A^k|^2 as a weighted sum of full contractions <p^{k,s}, p^{k,s}>: free tangent
// positions run over the tangent frame, free labels over the normal frame, each
// slice weighted by C(k,s) for the choice of tangent argument positions.
struct NormExpression {
  struct Part {
    int s = 0;
    long long weight = 0;
    PolyTensor p;
  };
  int k = 0;
  std::vector<Part> parts;
};

inline NormExpression squared_norm_expr(const RecursionTable& table, int k) {
  NormExpression e;
  e.k = k;
  for (int s = 0; s <= k; ++s) {
    const PolyTensor& p = table.at(k, s);
    if (p.is_zero()) continue;
    e.parts.push_back({s, binomial(k, s), p});
  }
  return e;
}

}  // namespace distjet
