#include "charisma/digest.hpp"

#include <fstream>
#include <sstream>

#include "charisma/errors.hpp"

namespace charisma {

std::string fnv1a64_hex(std::string_view data) {
    std::uint64_t hash = fnv1a64(data);
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file for digest: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return "fnv1a64:" + fnv1a64_hex(buffer.str());
}

}  // namespace charisma
