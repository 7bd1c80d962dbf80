#pragma once

#include <string>

#include "modat/model.hpp"
#include "modat/parser.hpp"

namespace modat {

/// Canonical text for a model. parse_model(format_model(m)) is structurally
/// equal to m, and formatting a reparsed model is idempotent.
std::string format_model(const Model& model);

std::string format_expr(const Expr& expr);
std::string format_assignment(const Assignment& a);

/// Signature plus body, used as the canonical form when comparing functions.
std::string format_function(const FunctionDef& fn, int indent = 0);

std::string format_scenario(const Scenario& scenario);

}  // namespace modat
