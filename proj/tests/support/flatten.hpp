#pragma once

// Reference flattening: expands a block into every member it has after
// inheritance, straight from the declarations. Used as the oracle for
// interface and rebase checks.

#include <map>
#include <string>

#include "modat/model.hpp"

namespace oracle {

struct FlatBlock {
    modat::BlockKind kind = modat::BlockKind::Composite;
    std::map<std::string, std::string> parts;       // name -> block
    std::map<std::string, std::string> attributes;  // name -> "TYPE io = initial"
    std::map<std::string, std::string> functions;   // name -> canonical text

    friend bool operator==(const FlatBlock&, const FlatBlock&) = default;
};

/// `rename` maps block names inside part declarations, so a block can be
/// compared across a model transformation that renamed its part types.
FlatBlock flatten(const modat::Model& model, const std::string& block,
                  const std::map<std::string, std::string>& rename = {});

/// Human-readable list of differing members; empty when equal.
std::string difference(const FlatBlock& before, const FlatBlock& after);

}  // namespace oracle
