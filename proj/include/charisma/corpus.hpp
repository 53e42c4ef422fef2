#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "charisma/labels.hpp"

namespace charisma {

enum class SentenceSource { generated, vuamc };

std::string_view source_name(SentenceSource source);
SentenceSource parse_source(std::string_view name);

// One labeled sentence plus provenance. `meta` is an open JSON object
// (prompt_id, batch_index, model_name, curation_flags, ...); unknown keys
// survive load/save verbatim.
struct LabeledSentence {
    std::string id;
    std::string text;
    CLTLabel label = CLTLabel::metaphor_simile;
    SentenceSource source = SentenceSource::generated;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();

    bool operator==(const LabeledSentence& other) const;
};

inline constexpr int kCorpusSchemaVersion = 1;

// Immutable-by-convention container: build it, then share it read-only.
struct Corpus {
    std::vector<LabeledSentence> sentences;
    int schema_version = kCorpusSchemaVersion;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }

    bool operator==(const Corpus& other) const { return sentences == other.sentences; }
};

struct CorpusStats {
    std::map<CLTLabel, std::int64_t> per_label;  // every label present, possibly 0
    std::int64_t total = 0;
    std::int64_t min_chars = 0;
    std::int64_t max_chars = 0;
    double mean_chars = 0.0;
};

/// Fresh content-independent id ("s-" + 32 hex chars).
std::string make_sentence_id();

/// Reseeds the id stream so runs driven by a config seed reproduce ids.
void seed_sentence_ids(std::uint64_t seed);

/// Throws IntegrityError if the sentence violates its invariants
/// (empty text after whitespace collapse, vuamc source with a non-metaphor label).
void validate_sentence(const LabeledSentence& sentence);

nlohmann::ordered_json sentence_to_json(const LabeledSentence& sentence);
LabeledSentence sentence_from_json(const nlohmann::ordered_json& object);

// JSON-lines I/O. load_corpus preserves line order and rejects duplicate ids;
// save_corpus writes keys in canonical order so save-load-save is
// byte-identical.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace charisma
