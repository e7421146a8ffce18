#include "stablebelief/provenance.hpp"

#include <cstdio>

#ifndef SB_VERSION
#define SB_VERSION "unknown"
#endif

namespace sb {

std::string version() { return SB_VERSION; }

std::string config_hash(const nlohmann::json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string header_line(std::uint64_t seed, const std::string& hash) {
    return "# stablebelief " + version() + " seed=" + std::to_string(seed) + " config=" + hash;
}

}  // namespace sb
