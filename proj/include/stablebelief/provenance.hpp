#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace sb {

std::string version();

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits. nlohmann objects
/// keep keys sorted, so equal configs hash equally.
std::string config_hash(const nlohmann::json& config);

/// "# stablebelief <version> seed=<seed> config=<hash>"
std::string header_line(std::uint64_t seed, const std::string& hash);

}  // namespace sb
