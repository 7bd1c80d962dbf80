#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modat/model.hpp"
#include "modat/source.hpp"

namespace modat {

inline constexpr std::string_view kGrammarVersion = "modat v1";

struct ModelParseResult {
    std::optional<Model> model;
    Diagnostics diagnostics;
};

/// Parses and name-resolves a `.modat` source. Never throws on malformed
/// input; every failure is reported as a spanned diagnostic.
///
/// Syntax errors use codes E1xx, resolution errors E2xx. Well-formedness
/// rules (E001..E008) are left to the validator, so a model with a
/// variant-of-variant still parses.
ModelParseResult parse_model(std::string_view text, std::string_view file = "<input>");

struct Invocation {
    std::string instancePath;  // dotted, starting at the root instance
    std::string function;
    std::vector<Value> args;
    SourceSpan span;
};

struct InputEvent {
    int cycle = 0;
    std::string instancePath;  // component instance; the target is its Signal
    Value value;
    SourceSpan span;
};

struct Assertion {
    int cycle = 0;
    ExprPtr expr;  // references are `<instancePath>.<attribute>`
    bool expected = true;
    SourceSpan span;
};

struct Scenario {
    Invocation invocation;
    std::vector<InputEvent> inputs;
    std::vector<Assertion> assertions;
    int maxCycles = 1000;
};

struct ScenarioParseResult {
    std::optional<Scenario> scenario;
    Diagnostics diagnostics;
};

/// Parses a `.scn` file and resolves its paths against `model`.
///
///     invoke stamp.stampCylinder.extend(40)
///     at 3 set stamp.stampCylinder.pressureSensor.Signal = 30
///     at 4 expect stamp.stampCylinder.valveExtend.Signal == TRUE
///     at 4 forbid stamp.stampCylinder.valveRetract.Signal
///     maxcycles 20
ScenarioParseResult parse_scenario(std::string_view text, const Model& model,
                                   std::string_view file = "<input>");

}  // namespace modat
