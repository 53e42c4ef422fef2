#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace charisma {

// FNV-1a, 64 bit. Content fingerprint for manifests and prompt ids;
// not cryptographic.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view data);

/// Digest of a file's bytes, formatted "fnv1a64:<16 hex>". Throws IoError.
std::string file_digest(const std::string& path);

}  // namespace charisma
