#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace shrinker {

/// "%.17g", with nan/inf spelled as JSON-safe strings.
std::string format_double(double v);

/// Serializes like nlohmann::json::dump but prints every floating-point
/// number with 17 significant digits and keeps object key order.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace shrinker
