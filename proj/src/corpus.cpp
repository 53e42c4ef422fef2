#include "charisma/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <unordered_set>

#include "charisma/errors.hpp"
#include "charisma/text_norm.hpp"

namespace charisma {

std::string_view source_name(SentenceSource source) {
    return source == SentenceSource::generated ? "generated" : "vuamc";
}

SentenceSource parse_source(std::string_view name) {
    if (name == "generated") {
        return SentenceSource::generated;
    }
    if (name == "vuamc") {
        return SentenceSource::vuamc;
    }
    throw SchemaError("unknown source string: \"" + std::string(name) + "\"");
}

bool LabeledSentence::operator==(const LabeledSentence& other) const {
    return id == other.id && text == other.text && label == other.label &&
           source == other.source && meta == other.meta;
}

namespace {

std::mt19937_64& id_rng() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    return rng;
}

}  // namespace

std::string make_sentence_id() {
    static const char* hex = "0123456789abcdef";
    std::string id = "s-";
    for (int block = 0; block < 2; ++block) {
        std::uint64_t v = id_rng()();
        for (int i = 0; i < 16; ++i) {
            id.push_back(hex[(v >> (60 - 4 * i)) & 0xF]);
        }
    }
    return id;
}

void seed_sentence_ids(std::uint64_t seed) { id_rng().seed(seed); }

void validate_sentence(const LabeledSentence& sentence) {
    if (sentence.id.empty()) {
        throw IntegrityError("sentence id is empty");
    }
    if (collapse_whitespace(sentence.text).empty()) {
        throw IntegrityError("sentence text is empty after whitespace normalization (id " +
                             sentence.id + ")");
    }
    if (sentence.source == SentenceSource::vuamc && sentence.label != CLTLabel::metaphor_simile) {
        throw IntegrityError("vuamc sentence must carry the metaphor_simile label (id " +
                             sentence.id + ")");
    }
}

nlohmann::ordered_json sentence_to_json(const LabeledSentence& sentence) {
    nlohmann::ordered_json object;
    object["id"] = sentence.id;
    object["text"] = sentence.text;
    object["label"] = std::string(label_name(sentence.label));
    object["source"] = std::string(source_name(sentence.source));
    object["meta"] = sentence.meta;
    return object;
}

LabeledSentence sentence_from_json(const nlohmann::ordered_json& object) {
    if (!object.is_object()) {
        throw SchemaError("sentence record is not a JSON object");
    }
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (key != "id" && key != "text" && key != "label" && key != "source" && key != "meta") {
            throw SchemaError("unexpected key \"" + key + "\" in sentence record");
        }
    }
    LabeledSentence sentence;
    if (!object.contains("id") || !object["id"].is_string()) {
        throw SchemaError("missing or non-string \"id\"");
    }
    if (!object.contains("text") || !object["text"].is_string()) {
        throw SchemaError("missing or non-string \"text\"");
    }
    if (!object.contains("label") || !object["label"].is_string()) {
        throw SchemaError("missing or non-string \"label\"");
    }
    sentence.id = object["id"].get<std::string>();
    sentence.text = object["text"].get<std::string>();
    sentence.label = parse_label(object["label"].get<std::string>());
    if (object.contains("source")) {
        if (!object["source"].is_string()) {
            throw SchemaError("non-string \"source\"");
        }
        sentence.source = parse_source(object["source"].get<std::string>());
    }
    if (object.contains("meta")) {
        if (!object["meta"].is_object()) {
            throw SchemaError("\"meta\" must be a JSON object");
        }
        sentence.meta = object["meta"];
    }
    validate_sentence(sentence);
    return sentence;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open corpus file: " + path);
    }
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        nlohmann::ordered_json object;
        try {
            object = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
        }
        LabeledSentence sentence;
        try {
            sentence = sentence_from_json(object);
        } catch (const SchemaError& e) {
            throw SchemaError("line " + std::to_string(line_number) + ": " + e.what());
        } catch (const IntegrityError& e) {
            throw IntegrityError("line " + std::to_string(line_number) + ": " + e.what());
        }
        if (!seen_ids.insert(sentence.id).second) {
            throw IntegrityError("line " + std::to_string(line_number) + ": duplicate id \"" +
                                 sentence.id + "\"");
        }
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open corpus file for writing: " + path);
    }
    for (const auto& sentence : corpus.sentences) {
        out << sentence_to_json(sentence).dump() << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    for (CLTLabel label : all_labels()) {
        stats.per_label[label] = 0;
    }
    stats.total = static_cast<std::int64_t>(corpus.size());
    if (corpus.empty()) {
        return stats;
    }
    std::int64_t min_chars = std::numeric_limits<std::int64_t>::max();
    std::int64_t max_chars = 0;
    std::int64_t sum_chars = 0;
    for (const auto& sentence : corpus.sentences) {
        stats.per_label[sentence.label] += 1;
        auto n = static_cast<std::int64_t>(sentence.text.size());
        min_chars = std::min(min_chars, n);
        max_chars = std::max(max_chars, n);
        sum_chars += n;
    }
    stats.min_chars = min_chars;
    stats.max_chars = max_chars;
    stats.mean_chars = static_cast<double>(sum_chars) / static_cast<double>(stats.total);
    return stats;
}

}  // namespace charisma
