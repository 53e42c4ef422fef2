#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charisma/corpus.hpp"
#include "charisma/encoding.hpp"

namespace charisma::testsupport {

// Deterministic rule-generated corpus: nine template families with
// class-exclusive marker words, so the classes are lexically separable.
// Sentences are unique per class after normalization.
Corpus synthetic_corpus(std::size_t per_class, std::uint64_t seed);

// Vocabulary covering every word the corpus produces, specials first.
std::vector<std::string> build_vocab_lines(const Corpus& corpus,
                                           const EncodingConfig& config = {});

void write_lines(const std::string& path, const std::vector<std::string>& lines);

/// Fresh directory under the system temp root; never reused.
std::string make_temp_dir(const std::string& prefix);

}  // namespace charisma::testsupport
