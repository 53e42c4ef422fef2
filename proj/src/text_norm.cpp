#include "charisma/text_norm.hpp"

#include <cctype>

namespace charisma {

namespace {

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_punct(unsigned char c) { return c < 128 && std::ispunct(c) != 0; }

}  // namespace

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u >= 'A' && u <= 'Z') {
            c = static_cast<char>(u - 'A' + 'a');
        }
    }
    return out;
}

std::string normalize_for_dedup(std::string_view text) {
    std::string stripped;
    stripped.reserve(text.size());
    for (unsigned char c : text) {
        if (is_punct(c)) {
            stripped.push_back(' ');
        } else {
            stripped.push_back(static_cast<char>(c));
        }
    }
    return collapse_whitespace(ascii_lower(stripped));
}

std::vector<std::string> normalized_tokens(std::string_view text) {
    std::string norm = normalize_for_dedup(text);
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < norm.size()) {
        std::size_t j = norm.find(' ', i);
        if (j == std::string::npos) {
            j = norm.size();
        }
        if (j > i) {
            tokens.emplace_back(norm.substr(i, j - i));
        }
        i = j + 1;
    }
    return tokens;
}

double token_jaccard(const std::unordered_set<std::string>& a,
                     const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& t : small) {
        if (large.count(t) > 0) {
            ++inter;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double token_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::unordered_set<std::string> sa(a.begin(), a.end());
    std::unordered_set<std::string> sb(b.begin(), b.end());
    return token_jaccard(sa, sb);
}

}  // namespace charisma
