#pragma once

#include <span>
#include <stdexcept>
#include <string_view>

#include "modat/model.hpp"
#include "modat/source.hpp"

namespace modat {

struct RuleId {
    std::string_view code;
    std::string_view description;
};

/// Every rule, in the order validate() runs them. Codes never change meaning.
std::span<const RuleId> all_rules();

class UnknownRule : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ValidateOptions {
    /// Report E001 as a warning instead of an error.
    bool allowDeepInheritance = false;
};

/// All rule outputs, sorted by (file, line, column, code). An empty result
/// means the model is well-formed.
Diagnostics validate(const Model& model, const ValidateOptions& options = {});

/// Diagnostics for a single rule, e.g. check_rule(m, "E006").
Diagnostics check_rule(const Model& model, std::string_view code,
                       const ValidateOptions& options = {});

}  // namespace modat
