#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace charisma {

/// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view text);

/// ASCII lowercase; bytes outside [A-Z] pass through untouched.
std::string ascii_lower(std::string_view text);

// Curation-grade normalization: lowercase, strip ASCII punctuation,
// collapse whitespace. Two sentences are exact duplicates iff their
// normalized forms are equal.
std::string normalize_for_dedup(std::string_view text);

/// Whitespace tokens of the normalized form.
std::vector<std::string> normalized_tokens(std::string_view text);

/// Jaccard similarity of the unique-token sets of two token lists.
double token_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

double token_jaccard(const std::unordered_set<std::string>& a,
                     const std::unordered_set<std::string>& b);

}  // namespace charisma
