#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modat/model.hpp"

namespace modat {

struct ModelStats {
    int blocks = 0;
    int components = 0;
    int composites = 0;
    int variants = 0;
    int functions = 0;  // declared, overrides included
    int instances = 0;
    std::vector<std::pair<std::string, int>> instancesPerBlock;  // declaration order, unused blocks omitted
    int inputs = 0;
    int outputs = 0;
    std::map<int, int> depthHistogram;  // inheritance depth -> block count
};

ModelStats compute_stats(const Model& model);

std::string render_stats(const ModelStats& stats);

}  // namespace modat
