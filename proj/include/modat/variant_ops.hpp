#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modat/model.hpp"

namespace modat {

/// Lock status of one function in a variant's effective interface.
/// Throws ModelError: UnknownBlock, NotAVariant, UnknownFunction.
LockStatus compute_lock_status(const Model& model, std::string_view variantName,
                               std::string_view functionName);

struct InterfaceDiff {
    std::vector<std::string> added;    // in b only, b's order
    std::vector<std::string> removed;  // in a only, a's order
    std::vector<std::string> changed;  // in both, signature or body differs; a's order
};

InterfaceDiff diff_interface(const Model& model, std::string_view a, std::string_view b);

struct RebaseOptions {
    /// Name for the demoted base; defaults to `<oldBase>_Classic`.
    std::optional<std::string> demotedName;
};

struct RebaseResult {
    Model model;
    /// Old block name -> name of the block carrying its definition afterwards.
    /// The promoted variant maps to the old base name, the old base to the
    /// demoted name; untouched blocks are absent.
    std::map<std::string, std::string> renamed;
};

/// Base-block change: `variantName` (a variant of `oldBaseName`) becomes the
/// new family base under the old base's name. The old base is demoted to a
/// variant of it and every sibling variant is re-parented; members whose
/// inherited definition would change are copied down.
///
/// Variants can only add members, so anything the promoted variant adds over
/// the old base is inherited by all re-parented blocks as well.
///
/// Throws ModelError: UnknownBlock, NotAVariantOf, DuplicateBlock (demoted
/// name taken), MemberConflict (a sibling adds a member with the same name as
/// the promoted variant but incompatible shape).
RebaseResult rebase_with_renames(const Model& model, std::string_view oldBaseName,
                                 std::string_view variantName, const RebaseOptions& options = {});

Model rebase(const Model& model, std::string_view oldBaseName, std::string_view variantName,
             const RebaseOptions& options = {});

}  // namespace modat
