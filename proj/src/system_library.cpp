#include "modat/system_library.hpp"

namespace modat {

std::span<const BuiltinSpec> builtins() {
    static const std::vector<BuiltinSpec> kBuiltins = {
        {Builtin::Delay, "delay", {Param{"duration", TypeTag::Time}}},
        {Builtin::WaitCycles, "waitCycles", {Param{"count", TypeTag::Int}}},
    };
    return kBuiltins;
}

const BuiltinSpec* find_builtin(std::string_view name) {
    for (const auto& b : builtins()) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

}  // namespace modat
