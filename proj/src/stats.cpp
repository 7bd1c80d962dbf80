#include "modat/stats.hpp"

#include "modat/model_ops.hpp"

namespace modat {

namespace {

void walk(const Model& m, const ObjectInstance& inst, std::map<std::string, int>& counts, ModelStats& s) {
    ++counts[inst.block];
    const BlockDef* b = m.find_block(inst.block);
    if (b && b->kind == BlockKind::Component) {
        auto attrs = effective_attributes(m, b->name);
        if (const AttributeDef* sig = find_signal(attrs)) {
            if (sig->io == IoDirection::Input) ++s.inputs;
            if (sig->io == IoDirection::Output) ++s.outputs;
        }
    }
    for (const auto& c : inst.children) walk(m, c, counts, s);
}

}  // namespace

ModelStats compute_stats(const Model& model) {
    ModelStats s;
    for (const auto& b : model.blocks) {
        ++s.blocks;
        if (b.kind == BlockKind::Component) ++s.components;
        if (b.kind == BlockKind::Composite) ++s.composites;
        if (b.base) ++s.variants;
        s.functions += static_cast<int>(b.functions.size());
        int depth = 0;
        for (const BlockDef* cur = &b; cur && cur->base && depth <= static_cast<int>(model.blocks.size()); ++depth) {
            cur = model.find_block(*cur->base);
        }
        ++s.depthHistogram[depth];
    }
    std::map<std::string, int> counts;
    ObjectInstance root = instantiate(model, model.root.block, model.root.instance);
    walk(model, root, counts, s);
    for (const auto& b : model.blocks) {
        if (auto it = counts.find(b.name); it != counts.end()) {
            s.instancesPerBlock.emplace_back(b.name, it->second);
            s.instances += it->second;
        }
    }
    return s;
}

std::string render_stats(const ModelStats& s) {
    std::string out;
    auto line = [&](const std::string& l) { out += l + "\n"; };
    line("blocks: " + std::to_string(s.blocks) + " (" + std::to_string(s.components) + " components, " +
         std::to_string(s.composites) + " composites)");
    line("variants: " + std::to_string(s.variants));
    line("functions: " + std::to_string(s.functions));
    line("instances: " + std::to_string(s.instances));
    for (const auto& [block, n] : s.instancesPerBlock) line("  " + block + ": " + std::to_string(n));
    line("I/O: " + std::to_string(s.inputs + s.outputs) + " (" + std::to_string(s.inputs) + " inputs, " +
         std::to_string(s.outputs) + " outputs)");
    line("inheritance depth:");
    for (const auto& [depth, n] : s.depthHistogram) line("  " + std::to_string(depth) + ": " + std::to_string(n));
    return out;
}

}  // namespace modat
