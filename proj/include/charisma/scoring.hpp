#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "charisma/classifier.hpp"

namespace charisma {

struct SentenceResult {
    std::string text;
    Prediction prediction;
    bool confident = false;  // top probability reached the threshold
};

struct DocumentProfile {
    std::string document_id;
    std::vector<SentenceResult> sentence_results;
    // Share of each predicted tactic among confident sentences; only
    // nonzero entries appear. Sums to 1 when n_confident > 0.
    std::map<CLTLabel, double> tactic_frequencies;
    std::size_t n_sentences = 0;
    std::size_t n_confident = 0;
    double confidence_threshold = 0.5;
};

// Rule-based splitter on terminal punctuation with an abbreviation guard
// list. Segments keep their order; empties are dropped.
std::vector<std::string> segment(const std::string& text);

// Labels every sentence and aggregates the confident ones into a tactic
// profile. tau outside [0, 1] raises ArgumentError; an empty document
// yields an empty profile.
DocumentProfile score_document(const Checkpoint& ckpt, const std::string& document_id,
                               const std::string& text, double tau = 0.5);

nlohmann::ordered_json document_profile_to_json(const DocumentProfile& profile);

}  // namespace charisma
