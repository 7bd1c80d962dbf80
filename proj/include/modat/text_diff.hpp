#pragma once

#include <string>
#include <string_view>

namespace modat {

/// Unified diff (3 lines of context) between two texts; empty if equal.
std::string unified_diff(std::string_view before, std::string_view after, std::string_view beforeName,
                         std::string_view afterName);

}  // namespace modat
