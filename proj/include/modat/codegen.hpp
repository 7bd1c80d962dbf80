#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modat/model.hpp"
#include "modat/parser.hpp"
#include "modat/source.hpp"

namespace modat {

/// dots become underscores, underscore runs collapse, leading/trailing
/// underscores are dropped, a leading digit gets an `n` prefix.
std::string mangle_name(std::string_view name);

/// Injective mangling within one namespace. ST identifiers are
/// case-insensitive, so uniqueness is checked without regard to case;
/// collisions get `_1`, `_2`, ... suffixes in registration order.
class NameMangler {
public:
    NameMangler() = default;
    explicit NameMangler(const std::set<std::string>& reserved);

    /// Registers and returns a fresh identifier derived from `name`.
    std::string operator()(std::string_view name);

private:
    std::set<std::string> used_;  // upper-cased
};

struct CodegenOptions {
    /// EXTENDS + METHOD emission instead of flattened function blocks.
    bool oop = false;
    /// Accept variant-of-variant chains (E001 reported as a warning).
    bool allowDeepInheritance = false;
};

/// Command codes understood by every generated composite function block.
enum class StCommand : int {
    Call = 1,     // run a function as a caller's Do step
    Step = 2,     // one scan step of a function
    Bind = 3,     // bind arguments from the slot inputs
    Restart = 4,  // preempted with policy restart
    Pause = 5,    // preempted with policy resume
    Detach = 6,   // preempted with policy continue
    Phase = 7,    // step detached functions in the subtree
    Query = 8,    // rDone := function finished
    Init = 9,     // apply variant initial values (EXTENDS emission)
};

struct STUnit {
    struct Pou {
        std::string name;
        std::string text;
    };
    std::vector<Pou> pous;  // function blocks in model order, then PROGRAM Main
    /// Model variable (`stamp.stampCylinder.strokes`) -> ST access path
    /// from Main (`stamp.stampCylinder.strokes`), in instance pre-order.
    std::vector<std::pair<std::string, std::string>> symbols;
    CodegenOptions options;

    std::string text() const;
};

class InvalidModel : public std::runtime_error {
public:
    explicit InvalidModel(Diagnostics d);
    const Diagnostics& diagnostics() const { return diags_; }

private:
    Diagnostics diags_;
};

STUnit generate_st(const Model& model, const CodegenOptions& options = {});

/// Values for PROGRAM Main's inputs that select and parametrize the invoked
/// function: entryFn, entrySel and the argument slots.
struct StEntry {
    int entryFn = 0;
    int entrySel = 0;
    std::vector<std::pair<std::string, Value>> slots;
};

StEntry st_entry(const Model& model, const Invocation& invocation);

}  // namespace modat
