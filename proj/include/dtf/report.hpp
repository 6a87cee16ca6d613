#pragma once

#include <string>

#include <json.hpp>

#include "dtf/error.hpp"
#include "dtf/factorizer.hpp"

namespace dtf {

inline constexpr const char* kReportSchema = "dtf-report/1";

nlohmann::json to_json(const FieldElem& f);
nlohmann::json to_json(const DiffOp& p);  // {"i,j": coefficient}
nlohmann::json to_json(const SchrodingerOp& l);
nlohmann::json to_json(const DarbouxMorphism& m);
nlohmann::json to_json(const FactorStep& s);
nlohmann::json to_json(const FactorizationChain& chain, const DarbouxMorphism& input);
nlohmann::json to_json(const Error& e);

/// Process exit status for a failure: 2 for mathematical outcomes, 1 for
/// usage and parse errors.
int exit_code(const Error& e);

}  // namespace dtf
