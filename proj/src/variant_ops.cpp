#include "modat/variant_ops.hpp"

#include <algorithm>

#include "modat/model_ops.hpp"

namespace modat {

namespace {

const BlockDef& require_block(const Model& model, std::string_view name) {
    const BlockDef* b = model.find_block(name);
    if (!b) throw ModelError(ModelErrorCode::UnknownBlock, "unknown block '" + std::string(name) + "'");
    return *b;
}

struct Flat {
    std::vector<PartDef> parts;
    std::vector<AttributeDef> attributes;
    std::vector<FunctionDef> functions;  // empty for components (intrinsics are implicit)
};

Flat flatten(const Model& m, const BlockDef& b, BlockKind kind) {
    Flat f;
    f.parts = effective_parts(m, b.name);
    f.attributes = effective_attributes(m, b.name);
    if (kind != BlockKind::Component) {
        for (auto& e : effective_interface(m, b.name)) {
            e.function.isOverride = false;
            f.functions.push_back(std::move(e.function));
        }
    }
    return f;
}

template <typename T>
const T* by_name(const std::vector<T>& items, const std::string& name) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == name; });
    return it == items.end() ? nullptr : &*it;
}

// Expresses `target` as a variant of `base` with as few own members as possible.
BlockDef derive_variant(const std::string& name, const Flat& target, const BlockDef& base, const Flat& baseFlat) {
    BlockDef v;
    v.name = name;
    v.kind = base.kind;
    v.base = base.name;
    for (const auto& p : target.parts) {
        const PartDef* inherited = by_name(baseFlat.parts, p.name);
        if (!inherited) {
            v.parts.push_back(p);
        } else if (inherited->block != p.block) {
            throw ModelError(ModelErrorCode::MemberConflict,
                             "part '" + p.name + "' of '" + name + "' clashes with the new base");
        }
    }
    for (const auto& a : target.attributes) {
        const AttributeDef* inherited = by_name(baseFlat.attributes, a.name);
        if (!inherited) {
            v.attributes.push_back(a);
        } else if (inherited->type != a.type || inherited->io != a.io) {
            throw ModelError(ModelErrorCode::MemberConflict,
                             "attribute '" + a.name + "' of '" + name + "' clashes with the new base");
        } else if (!(inherited->initial == a.initial)) {
            AttributeDef copy = a;
            copy.io = IoDirection::None;  // direction stays with the inherited declaration
            v.attributes.push_back(copy);
        }
    }
    for (const auto& f : target.functions) {
        const FunctionDef* inherited = by_name(baseFlat.functions, f.name);
        if (!inherited) {
            v.functions.push_back(f);
        } else if (!same_definition(*inherited, f)) {
            FunctionDef copy = f;
            copy.isOverride = true;
            v.functions.push_back(std::move(copy));
        }
    }
    return v;
}

std::string demoted_name(const Model& m, const std::string& base, const RebaseOptions& options) {
    if (options.demotedName) {
        if (m.find_block(*options.demotedName)) {
            throw ModelError(ModelErrorCode::DuplicateBlock,
                             "block '" + *options.demotedName + "' already exists");
        }
        return *options.demotedName;
    }
    std::string name = base + "_Classic";
    for (int i = 2; m.find_block(name); ++i) name = base + "_Classic" + std::to_string(i);
    return name;
}

}  // namespace

LockStatus compute_lock_status(const Model& model, std::string_view variantName, std::string_view functionName) {
    const BlockDef& b = require_block(model, variantName);
    if (!b.base) {
        throw ModelError(ModelErrorCode::NotAVariant, "'" + b.name + "' is not a variant");
    }
    for (const auto& e : effective_interface(model, variantName)) {
        if (e.function.name == functionName) return e.status;
    }
    throw ModelError(ModelErrorCode::UnknownFunction,
                     "'" + b.name + "' has no function '" + std::string(functionName) + "'");
}

InterfaceDiff diff_interface(const Model& model, std::string_view a, std::string_view b) {
    require_block(model, a);
    require_block(model, b);
    auto ia = effective_interface(model, a);
    auto ib = effective_interface(model, b);
    auto find = [](const std::vector<InterfaceEntry>& xs, const std::string& n) -> const FunctionDef* {
        for (const auto& e : xs) {
            if (e.function.name == n) return &e.function;
        }
        return nullptr;
    };
    InterfaceDiff d;
    for (const auto& e : ia) {
        const FunctionDef* other = find(ib, e.function.name);
        if (!other) {
            d.removed.push_back(e.function.name);
        } else if (!same_definition(e.function, *other)) {
            d.changed.push_back(e.function.name);
        }
    }
    for (const auto& e : ib) {
        if (!find(ia, e.function.name)) d.added.push_back(e.function.name);
    }
    return d;
}

RebaseResult rebase_with_renames(const Model& model, std::string_view oldBaseName, std::string_view variantName,
                                 const RebaseOptions& options) {
    const BlockDef& oldBase = require_block(model, oldBaseName);
    const BlockDef& variant = require_block(model, variantName);
    if (oldBase.base || !variant.base || *variant.base != oldBase.name) {
        throw ModelError(ModelErrorCode::NotAVariantOf,
                         "'" + variant.name + "' is not a variant of base block '" + oldBase.name + "'");
    }
    const std::string demoted = demoted_name(model, oldBase.name, options);

    BlockDef newBase;
    newBase.name = oldBase.name;
    newBase.kind = oldBase.kind;
    newBase.span = variant.span;
    Flat promoted = flatten(model, variant, oldBase.kind);
    newBase.parts = promoted.parts;
    newBase.attributes = promoted.attributes;
    newBase.functions = promoted.functions;

    RebaseResult result;
    result.renamed[variant.name] = oldBase.name;
    result.renamed[oldBase.name] = demoted;

    Model& out = result.model;
    out.systemFunctions = model.systemFunctions;
    out.root = model.root;
    for (const auto& b : model.blocks) {
        if (b.name == variant.name) continue;
        if (b.name == oldBase.name) {
            out.blocks.push_back(newBase);
            BlockDef d = derive_variant(demoted, flatten(model, oldBase, oldBase.kind), newBase, promoted);
            d.span = oldBase.span;
            out.blocks.push_back(std::move(d));
        } else if (b.base && *b.base == oldBase.name) {
            BlockDef s = derive_variant(b.name, flatten(model, b, oldBase.kind), newBase, promoted);
            s.span = b.span;
            out.blocks.push_back(std::move(s));
        } else {
            out.blocks.push_back(b);
        }
    }

    auto rename = [&](std::string& block) {
        auto it = result.renamed.find(block);
        if (it != result.renamed.end()) block = it->second;
    };
    for (auto& b : out.blocks) {
        for (auto& p : b.parts) rename(p.block);
    }
    rename(out.root.block);

    for (const auto& b : out.blocks) {
        if (!b.base) continue;
        const BlockDef* base = out.find_block(*b.base);
        if (!base || base->base) {
            throw ModelError(ModelErrorCode::DepthViolation,
                             "rebase produced an inheritance chain through '" + b.name + "'");
        }
    }
    return result;
}

Model rebase(const Model& model, std::string_view oldBaseName, std::string_view variantName,
             const RebaseOptions& options) {
    return rebase_with_renames(model, oldBaseName, variantName, options).model;
}

}  // namespace modat
