#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "distjet/recursion.hpp"
#include "distjet/tensor_poly.hpp"

// Human-readable and JSON dumps of tensor polynomials. Text form is one term per
// line, e.g.
//     1 * B[i1,i2; j1]
//    -1 * B[i1,i2; r1] * B[i3,i4; r1]
// with free tangent positions i1.., free labels j1.., bonds r1.. (1-based). B-jets
// of order a print as D{a}B with derivative slots leading.

namespace distjet {

namespace detail {

inline std::string endpoint_token(const Endpoint& e) {
  switch (e.kind) {
    case EndKind::FreeTangent:
      return "i" + std::to_string(e.index + 1);
    case EndKind::FreeLabel:
      return "j" + std::to_string(e.index + 1);
    case EndKind::Bond:
      return "r" + std::to_string(e.index + 1);
  }
  return "?";
}

inline std::string factor_text(const TensorFactor& f) {
  std::ostringstream os;
  if (f.is_kronecker()) {
    os << "delta[" << endpoint_token(f.ends[0]) << "," << endpoint_token(f.ends[1]) << "]";
    return os.str();
  }
  if (f.order == 0)
    os << "B[";
  else
    os << "D" << f.order << "B[";
  for (int s = 0; s < f.order + 2; ++s) {
    if (s) os << ",";
    os << endpoint_token(f.ends[s]);
  }
  os << "; " << endpoint_token(f.ends[f.order + 2]) << "]";
  return os.str();
}

}  // namespace detail

inline std::string to_text(const PolyTensor& p) {
  if (p.is_zero()) return "0\n";
  std::ostringstream os;
  for (const Term& t : p.terms) {
    os << t.coeff.str();
    for (const TensorFactor& f : t.factors) os << " * " << detail::factor_text(f);
    os << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json to_json(const Term& t) {
  nlohmann::ordered_json jt;
  if (t.coeff.is_integer())
    jt["coeff"] = t.coeff.num();
  else
    jt["coeff"] = t.coeff.str();
  jt["factors"] = nlohmann::ordered_json::array();
  std::map<int, std::pair<std::string, std::string>> edge_kinds;
  for (const TensorFactor& f : t.factors) {
    nlohmann::ordered_json jf;
    jf["kind"] = f.is_kronecker() ? "delta" : "B";
    jf["order"] = f.is_kronecker() ? 0 : f.order;
    auto slots = nlohmann::ordered_json::array();
    for (int s = 0; s < f.slot_count(); ++s) {
      slots.push_back(detail::endpoint_token(f.ends[s]));
      if (f.ends[s].kind == EndKind::Bond) {
        auto& [a, b] = edge_kinds[f.ends[s].index];
        std::string kind = f.slot_is_label(s) ? "label" : "tangent";
        (a.empty() ? a : b) = kind;
      }
    }
    jf["slots"] = slots;
    jt["factors"].push_back(jf);
  }
  jt["edges"] = nlohmann::ordered_json::array();
  for (auto& [id, kinds] : edge_kinds)
    jt["edges"].push_back({{"id", "r" + std::to_string(id + 1)},
                           {"ends", kinds.first + "-" + kinds.second}});
  return jt;
}

inline nlohmann::ordered_json to_json(const PolyTensor& p) {
  nlohmann::ordered_json j;
  j["k"] = p.k;
  j["s"] = p.s;
  j["terms"] = nlohmann::ordered_json::array();
  for (const Term& t : p.terms) {
    auto jt = to_json(t);
    jt["free"] = {{"tangent", p.s}, {"label", p.labels}};
    j["terms"].push_back(jt);
  }
  return j;
}

inline nlohmann::ordered_json to_json(const NormExpression& e) {
  nlohmann::ordered_json j;
  j["k"] = e.k;
  j["parts"] = nlohmann::ordered_json::array();
  for (const auto& part : e.parts)
    j["parts"].push_back({{"s", part.s},
                          {"weight", part.weight},
                          {"contraction", "full"},
                          {"p", to_json(part.p)}});
  return j;
}

}  // namespace distjet
