#pragma once

#include <map>
#include <utility>
#include <vector>

#include "distjet/tensor_poly.hpp"

// Literal transcription of the derivative recursion, kept deliberately dumb:
// terms are accumulated as produced, with no canonical form, no merging and
// bonded deltas left in place. The one cleanup it does share with the main
// table is dropping terms that vanish identically along the surface (a bare
// second-fundamental-form factor contracted against a tangent slot): the
// derivative step is only valid on term lists with those removed, since the
// term-by-term product rule does not annihilate their derivatives. Values must
// agree with the canonicalized table, which is what the cross-check tests
// exercise.

namespace distjet::naive {

using TermList = std::vector<Term>;

namespace detail {

inline void shift_free_tangents(Term& t, int amount) {
  for (TensorFactor& f : t.factors)
    for (Endpoint& e : f.ends)
      if (e.kind == EndKind::FreeTangent) e.index += amount;
}

inline int max_bond_id(const Term& t) {
  int mb = -1;
  for (const TensorFactor& f : t.factors)
    for (const Endpoint& e : f.ends)
      if (e.kind == EndKind::Bond) mb = std::max(mb, e.index);
  return mb;
}

// True if some bare-B label is evaluated on a tangent direction, which makes
// the whole term the zero field: pinned to a free tangent index, or bonded to
// a derivative or base slot of another jet factor.
inline bool vanishes_along_surface(const Term& t) {
  for (const TensorFactor& f : t.factors) {
    if (f.is_kronecker() || f.order != 0) continue;
    const Endpoint& label = f.ends[2];
    if (label.kind == EndKind::FreeTangent) return true;
    if (label.kind != EndKind::Bond) continue;
    for (const TensorFactor& g : t.factors)
      for (int s = 0; s < g.slot_count(); ++s) {
        if (&g == &f && s == 2) continue;
        if (g.is_kronecker() || g.slot_is_label(s)) continue;
        if (g.ends[s].kind == EndKind::Bond && g.ends[s].index == label.index)
          return true;
      }
  }
  return false;
}

}  // namespace detail

// Row-by-row table of raw term lists, indexed by (k, s).
inline std::map<std::pair<int, int>, TermList> raw_table(int k_max) {
  std::map<std::pair<int, int>, TermList> tab;
  for (int s = 0; s <= 2; ++s) tab[{2, s}] = {};
  {
    Term base;
    base.factors.push_back(kronecker_factor(free_tangent(0), free_tangent(1)));
    tab[{2, 2}] = {base};
  }

  for (int k = 3; k <= k_max; ++k) {
    const int kp = k - 1;
    for (int s = 0; s <= k; ++s) {
      TermList out;
      if (s < 2) {
        tab[{k, s}] = out;
        continue;
      }
      const int nlab = k - s;
      auto prev = [&](int sp) -> const TermList& {
        static const TermList empty;
        auto it = tab.find({kp, sp});
        return it == tab.end() ? empty : it->second;
      };

      // d/dx of the previous entry: Leibniz over jet factors, every existing
      // free tangent moves up one, the new derivative slot becomes tangent 0.
      for (const Term& t : prev(s - 1)) {
        for (size_t fi = 0; fi < t.factors.size(); ++fi) {
          if (t.factors[fi].is_kronecker()) continue;
          Term nt = t;
          detail::shift_free_tangents(nt, 1);
          TensorFactor& f = nt.factors[fi];
          f.order += 1;
          f.ends.insert(f.ends.begin(), free_tangent(0));
          out.push_back(std::move(nt));
        }
      }

      // Label h contracted against a fresh bare B, which re-exposes the label.
      for (const Term& t : prev(s - 1)) {
        for (int h = 0; h < nlab; ++h) {
          Term nt = t;
          nt.coeff = -nt.coeff;
          detail::shift_free_tangents(nt, 1);
          const int b = detail::max_bond_id(nt) + 1;
          for (TensorFactor& f : nt.factors)
            for (Endpoint& e : f.ends)
              if (e.kind == EndKind::FreeLabel && e.index == h) e = bond(b);
          nt.factors.push_back(bjet_factor(0, {bond(b), free_tangent(0), free_label(h)}));
          out.push_back(std::move(nt));
        }
      }

      // Leading label contracted with B evaluated on tangents (0, h).
      for (const Term& t : prev(s - 2)) {
        for (int h = 1; h <= s - 1; ++h) {
          Term nt = t;
          nt.coeff = -nt.coeff;
          const int b = detail::max_bond_id(nt) + 1;
          for (TensorFactor& f : nt.factors)
            for (Endpoint& e : f.ends) {
              if (e.kind == EndKind::FreeTangent)
                e.index = e.index + 1 < h ? e.index + 1 : e.index + 2;
              else if (e.kind == EndKind::FreeLabel)
                e = e.index == 0 ? Endpoint(bond(b)) : free_label(e.index - 1);
            }
          nt.factors.push_back(
              bjet_factor(0, {free_tangent(0), free_tangent(h), bond(b)}));
          out.push_back(std::move(nt));
        }
      }

      // Last tangent slot contracted against a fresh bare B carrying label h.
      if (s <= kp) {
        for (const Term& t : prev(s)) {
          for (int h = 0; h < nlab; ++h) {
            Term nt = t;
            const int b = detail::max_bond_id(nt) + 1;
            for (TensorFactor& f : nt.factors)
              for (Endpoint& e : f.ends) {
                if (e.kind == EndKind::FreeTangent)
                  e = e.index == s - 1 ? Endpoint(bond(b)) : free_tangent(e.index + 1);
                else if (e.kind == EndKind::FreeLabel && e.index >= h)
                  e = free_label(e.index + 1);
              }
            nt.factors.push_back(
                bjet_factor(0, {bond(b), free_tangent(0), free_label(h)}));
            out.push_back(std::move(nt));
          }
        }
      }

      TermList kept;
      for (Term& t : out)
        if (!detail::vanishes_along_surface(t)) kept.push_back(std::move(t));
      tab[{k, s}] = std::move(kept);
    }
  }
  return tab;
}

}  // namespace distjet::naive
