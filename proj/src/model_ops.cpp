#include "modat/model_ops.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "modat/formatter.hpp"

namespace modat {

namespace {

const BlockDef& require_block(const Model& model, std::string_view name) {
    const BlockDef* b = model.find_block(name);
    if (!b) throw ModelError(ModelErrorCode::UnknownBlock, "unknown block '" + std::string(name) + "'");
    return *b;
}

// Base chain from `b` upwards, bounded so a malformed (cyclic) chain cannot loop.
std::vector<const BlockDef*> chain_of(const Model& model, const BlockDef& b) {
    std::vector<const BlockDef*> chain{&b};
    while (chain.back()->base) {
        if (chain.size() > model.blocks.size()) {
            throw ModelError(ModelErrorCode::UnresolvedReference,
                             "inheritance cycle through '" + b.name + "'");
        }
        chain.push_back(&require_block(model, *chain.back()->base));
    }
    return chain;
}

void check_parts_resolve(const Model& model, const BlockDef& def) {
    for (const auto& p : def.parts) {
        if (p.block != def.name && !model.find_block(p.block)) {
            throw ModelError(ModelErrorCode::UnresolvedReference,
                             "part '" + p.name + "' of '" + def.name + "' refers to unknown block '" +
                                 p.block + "'");
        }
    }
}

bool assignments_equal(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].target != b[i].target || !expr_equal(*a[i].value, *b[i].value)) return false;
    }
    return true;
}

bool exprs_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!expr_equal(*a[i], *b[i])) return false;
    }
    return true;
}

bool node_equal(const Node& a, const Node& b) {
    if (a.id != b.id || a.action.index() != b.action.index()) return false;
    if (auto* ca = std::get_if<CallAction>(&a.action)) {
        const auto& cb = std::get<CallAction>(b.action);
        if (ca->target != cb.target || ca->function != cb.function || !exprs_equal(ca->args, cb.args)) {
            return false;
        }
    } else if (!assignments_equal(std::get<SetAction>(a.action).assignments,
                                  std::get<SetAction>(b.action).assignments)) {
        return false;
    }
    return assignments_equal(a.entry, b.entry) && assignments_equal(a.exit, b.exit);
}

bool transition_equal(const Transition& a, const Transition& b) {
    if (a.source != b.source || a.target != b.target || a.kind != b.kind || a.policy != b.policy) {
        return false;
    }
    if (static_cast<bool>(a.condition) != static_cast<bool>(b.condition)) return false;
    if (a.condition && !expr_equal(*a.condition, *b.condition)) return false;
    return assignments_equal(a.operation, b.operation);
}

bool behavior_equal(const Behavior& a, const Behavior& b) {
    if (a.lanes != b.lanes || a.nodes.size() != b.nodes.size() ||
        a.transitions.size() != b.transitions.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        if (!node_equal(a.nodes[i], b.nodes[i])) return false;
    }
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        if (!transition_equal(a.transitions[i], b.transitions[i])) return false;
    }
    return true;
}

bool function_equal(const FunctionDef& a, const FunctionDef& b) {
    if (a.name != b.name || a.params != b.params || a.isOverride != b.isOverride) return false;
    if (a.body.has_value() != b.body.has_value()) return false;
    return !a.body || behavior_equal(*a.body, *b.body);
}

bool block_equal(const BlockDef& a, const BlockDef& b) {
    if (a.name != b.name || a.kind != b.kind || a.base != b.base) return false;
    if (a.parts.size() != b.parts.size() || a.attributes.size() != b.attributes.size() ||
        a.functions.size() != b.functions.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.parts.size(); ++i) {
        if (a.parts[i].name != b.parts[i].name || a.parts[i].block != b.parts[i].block) return false;
    }
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        const auto& x = a.attributes[i];
        const auto& y = b.attributes[i];
        if (x.name != y.name || x.type != y.type || !(x.initial == y.initial) || x.io != y.io) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        if (!function_equal(a.functions[i], b.functions[i])) return false;
    }
    return true;
}

}  // namespace

bool is_variant(const BlockDef& b) { return b.base.has_value(); }

Model define_block(Model model, BlockDef def) {
    if (def.base) {
        std::string base = *def.base;
        return define_variant(std::move(model), base, std::move(def));
    }
    if (model.find_block(def.name)) {
        throw ModelError(ModelErrorCode::DuplicateBlock, "block '" + def.name + "' is already defined");
    }
    check_parts_resolve(model, def);
    model.blocks.push_back(std::move(def));
    return model;
}

Model define_variant(Model model, std::string_view baseName, BlockDef def,
                     const DefineOptions& options) {
    const BlockDef* base = model.find_block(baseName);
    if (!base) {
        throw ModelError(ModelErrorCode::UnresolvedReference,
                         "unknown base block '" + std::string(baseName) + "'");
    }
    if (base->base && !options.allowDeepInheritance) {
        throw ModelError(ModelErrorCode::BaseIsVariant,
                         "'" + std::string(baseName) + "' is itself a variant of '" + *base->base +
                             "'; inheritance depth is limited to one");
    }
    if (model.find_block(def.name)) {
        throw ModelError(ModelErrorCode::DuplicateBlock, "block '" + def.name + "' is already defined");
    }
    def.base = std::string(baseName);
    def.kind = chain_of(model, *base).back()->kind;
    check_parts_resolve(model, def);
    std::string name = def.name;
    model.blocks.push_back(std::move(def));
    (void)effective_parts(model, name);  // DuplicatePart
    return model;
}

std::vector<FunctionDef> intrinsic_functions(const AttributeDef& signal) {
    std::vector<FunctionDef> out;
    if (signal.io != IoDirection::Input) {
        FunctionDef set;
        set.name = "setSignal";
        set.params.push_back(Param{"value", signal.type});
        out.push_back(std::move(set));
    }
    FunctionDef get;
    get.name = "getSignal";
    out.push_back(std::move(get));
    return out;
}

const AttributeDef* find_signal(const std::vector<AttributeDef>& attrs) {
    auto it = std::find_if(attrs.begin(), attrs.end(),
                           [](const AttributeDef& a) { return a.name == kSignal; });
    return it == attrs.end() ? nullptr : &*it;
}

std::vector<InterfaceEntry> effective_interface(const Model& model, std::string_view blockName) {
    const BlockDef& b = require_block(model, blockName);
    auto chain = chain_of(model, b);
    std::vector<InterfaceEntry> out;
    if (chain.back()->kind == BlockKind::Component) {
        auto attrs = effective_attributes(model, blockName);
        if (const AttributeDef* sig = find_signal(attrs)) {
            for (auto& f : intrinsic_functions(*sig)) {
                out.push_back({std::move(f), b.base ? LockStatus::Inherited : LockStatus::New});
            }
        }
        return out;
    }
    if (!b.base) {
        for (const auto& f : b.functions) out.push_back({f, LockStatus::New});
        return out;
    }
    auto inherited = effective_interface(model, *b.base);
    for (auto& [fn, status] : inherited) {
        if (const FunctionDef* own = b.find_function(fn.name)) {
            out.push_back({*own, same_definition(fn, *own) ? LockStatus::Inherited
                                                           : LockStatus::Overridden});
        } else {
            out.push_back({fn, LockStatus::Inherited});
        }
    }
    for (const auto& f : b.functions) {
        bool inBase = std::any_of(inherited.begin(), inherited.end(),
                                  [&](const InterfaceEntry& e) { return e.function.name == f.name; });
        if (!inBase) out.push_back({f, LockStatus::New});
    }
    return out;
}

std::vector<PartDef> effective_parts(const Model& model, std::string_view blockName) {
    const BlockDef& b = require_block(model, blockName);
    std::vector<PartDef> out;
    if (b.base) {
        chain_of(model, b);
        out = effective_parts(model, *b.base);
    }
    for (const auto& p : b.parts) {
        bool dup = std::any_of(out.begin(), out.end(), [&](const PartDef& q) { return q.name == p.name; });
        if (dup) {
            throw ModelError(ModelErrorCode::DuplicatePart,
                             "part '" + p.name + "' is declared twice in '" + b.name + "'");
        }
        out.push_back(p);
    }
    return out;
}

std::vector<AttributeDef> effective_attributes(const Model& model, std::string_view blockName) {
    const BlockDef& b = require_block(model, blockName);
    std::vector<AttributeDef> out;
    if (b.base) {
        chain_of(model, b);
        out = effective_attributes(model, *b.base);
    }
    for (const auto& a : b.attributes) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const AttributeDef& x) { return x.name == a.name; });
        if (it != out.end()) {
            IoDirection io = it->io;
            *it = a;
            it->io = io;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

std::optional<FunctionDef> find_effective_function(const Model& model, std::string_view blockName,
                                                   std::string_view functionName) {
    for (auto& e : effective_interface(model, blockName)) {
        if (e.function.name == functionName) return std::move(e.function);
    }
    return std::nullopt;
}

void check_acyclic(const Model& model) {
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        Mark& m = mark[name];
        if (m == Mark::Done) return;
        if (m == Mark::Active) {
            throw ModelError(ModelErrorCode::CyclicContainment,
                             "block '" + name + "' transitively contains itself");
        }
        m = Mark::Active;
        for (const auto& p : effective_parts(model, name)) visit(p.block);
        mark[name] = Mark::Done;
    };
    for (const auto& b : model.blocks) visit(b.name);
}

namespace {
ObjectInstance build_instance(const Model& model, const std::string& block, const std::string& path) {
    ObjectInstance obj;
    obj.path = path;
    obj.block = block;
    for (const auto& a : effective_attributes(model, block)) obj.variables.emplace_back(a.name, a.initial);
    for (const auto& p : effective_parts(model, block)) {
        obj.children.push_back(build_instance(model, p.block, path + "." + p.name));
    }
    return obj;
}
}  // namespace

ObjectInstance instantiate(const Model& model, std::string_view blockName,
                           std::string_view instanceName) {
    require_block(model, blockName);
    check_acyclic(model);
    return build_instance(model, std::string(blockName), std::string(instanceName));
}

std::size_t count_instances(const ObjectInstance& root) {
    std::size_t n = 1;
    for (const auto& c : root.children) n += count_instances(c);
    return n;
}

std::size_t count_variables(const ObjectInstance& root) {
    std::size_t n = root.variables.size();
    for (const auto& c : root.children) n += count_variables(c);
    return n;
}

bool same_definition(const FunctionDef& a, const FunctionDef& b) {
    return a.name == b.name && a.params == b.params && format_function(a) == format_function(b);
}

bool model_equal(const Model& a, const Model& b) {
    if (a.blocks.size() != b.blocks.size() || a.systemFunctions.size() != b.systemFunctions.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        if (!block_equal(a.blocks[i], b.blocks[i])) return false;
    }
    for (std::size_t i = 0; i < a.systemFunctions.size(); ++i) {
        if (!function_equal(a.systemFunctions[i], b.systemFunctions[i])) return false;
    }
    return a.root.instance == b.root.instance && a.root.block == b.root.block;
}

}  // namespace modat
