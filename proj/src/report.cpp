#include "dtf/report.hpp"

namespace dtf {

using nlohmann::json;

json to_json(const FieldElem& f) { return f.to_string(); }

json to_json(const DiffOp& p) {
  json out = json::object();
  for (const auto& [m, c] : p.terms()) out[std::to_string(m.dx) + "," + std::to_string(m.dy)] = c.to_string();
  return out;
}

json to_json(const SchrodingerOp& l) {
  return json{{"a", l.a().to_string()}, {"b", l.b().to_string()}, {"c", l.c().to_string()}};
}

json to_json(const DarbouxMorphism& m) {
  json out{{"source", to_json(m.source())}, {"target", to_json(m.target())}, {"M", to_json(m.m())}, {"N", to_json(m.n())},
           {"verified", true}};
  if (m.standard().is_zero()) {
    out["bidegree"] = nullptr;
  } else {
    const BiDegree bd = m.bidegree();
    out["bidegree"] = {bd.d1, bd.d2};
  }
  return out;
}

json to_json(const FactorStep& s) {
  json out{{"kind", step_kind_name(s.kind)}, {"morphism", to_json(s.morphism)}};
  if (s.witness) out["witness"] = s.witness->to_string();
  return out;
}

json to_json(const FactorizationChain& chain, const DarbouxMorphism& input) {
  json steps = json::array();
  for (const auto& s : chain.steps) steps.push_back(to_json(s));
  return json{{"input", to_json(input)},
              {"steps", steps},
              {"prefixLength", chain.prefix_length},
              {"composedEquivalent", chain.composed_equivalent},
              {"invertible", classify_invertible(chain)},
              {"diagnostics", chain.diagnostics}};
}

json to_json(const Error& e) {
  json out{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (!e.certificate().empty()) out["certificate"] = e.certificate();
  return out;
}

int exit_code(const Error& e) { return is_mathematical(e.code()) ? 2 : 1; }

}  // namespace dtf
