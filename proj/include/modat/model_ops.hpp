#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "modat/model.hpp"

namespace modat {

struct DefineOptions {
    /// Accept a variant whose base is itself a variant. The validator still
    /// reports E001 (as a warning when the same flag is given there).
    bool allowDeepInheritance = false;
};

/// Adds a base block. Part blocks must already be defined, or be the block
/// itself (containment cycles are reported by instantiate).
Model define_block(Model model, BlockDef def);

/// Adds `def` as a variant of `baseName`. Kind is taken from the base.
Model define_variant(Model model, std::string_view baseName, BlockDef def,
                     const DefineOptions& options = {});

struct InterfaceEntry {
    FunctionDef function;
    LockStatus status;
};

/// Base-declaration order, then functions new in the variant. Component
/// blocks report their intrinsic signal accessors.
std::vector<InterfaceEntry> effective_interface(const Model& model, std::string_view blockName);

/// Base parts followed by parts added in the variant.
std::vector<PartDef> effective_parts(const Model& model, std::string_view blockName);

/// Base attributes (with variant initial values applied) followed by new ones.
std::vector<AttributeDef> effective_attributes(const Model& model, std::string_view blockName);

/// Looks up a callable function in the effective interface, or nullptr.
std::optional<FunctionDef> find_effective_function(const Model& model, std::string_view blockName,
                                                   std::string_view functionName);

/// `setSignal(value)` / `getSignal()` for a component. Input components only
/// offer getSignal.
std::vector<FunctionDef> intrinsic_functions(const AttributeDef& signal);

const AttributeDef* find_signal(const std::vector<AttributeDef>& attrs);

bool is_variant(const BlockDef& b);

ObjectInstance instantiate(const Model& model, std::string_view blockName,
                           std::string_view instanceName);

std::size_t count_instances(const ObjectInstance& root);
std::size_t count_variables(const ObjectInstance& root);

/// Canonical comparison of two function definitions: name, parameter list and
/// formatted body text.
bool same_definition(const FunctionDef& a, const FunctionDef& b);

/// Structural equality of two models, spans ignored.
bool model_equal(const Model& a, const Model& b);

/// Throws ModelError(CyclicContainment) if some block transitively contains itself.
void check_acyclic(const Model& model);

}  // namespace modat
