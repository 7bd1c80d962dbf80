#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "modat/model.hpp"

namespace modat {

/// Black-box system functions known to the simulator and code generator.
/// A model declares the ones it uses with `system function <name>(...)`.
///
///   delay(duration: TIME)  completes once the accumulated scan time of its
///                          Do steps reaches `duration`
///   waitCycles(count: INT) completes on its `count`-th Do step
enum class Builtin { Delay, WaitCycles };

struct BuiltinSpec {
    Builtin id;
    std::string_view name;
    std::vector<Param> params;
};

std::span<const BuiltinSpec> builtins();
const BuiltinSpec* find_builtin(std::string_view name);

/// Scan period assumed by `delay` in both the simulator and generated code.
inline constexpr Duration kDefaultCycleTime{10};

}  // namespace modat
