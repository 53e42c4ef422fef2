#include "charisma/scoring.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

#include "charisma/errors.hpp"
#include "charisma/text_norm.hpp"

namespace charisma {

namespace {

bool is_digit_at(const std::string& text, std::size_t i) {
    return i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) != 0;
}

// Titles and other common truncations that end in a period mid-sentence.
const std::unordered_set<std::string>& abbreviation_guard() {
    static const std::unordered_set<std::string> guard = {
        "mr",  "mrs", "ms",  "dr",   "prof", "sr",   "jr",  "st",
        "vs",  "etc", "gov", "sen",  "rep",  "gen",  "col", "lt",
        "sgt", "capt", "rev", "hon", "dept", "inc",  "ltd", "fig",
        "al",  "approx"};
    return guard;
}

bool period_ends_sentence(const std::string& text, std::size_t i) {
    if (is_digit_at(text, i >= 1 ? i - 1 : text.size()) && is_digit_at(text, i + 1)) {
        return false;  // decimal point
    }
    std::size_t w = i;
    while (w > 0 && std::isspace(static_cast<unsigned char>(text[w - 1])) == 0) {
        --w;
    }
    std::string word = ascii_lower(text.substr(w, i - w));
    if (word.empty()) {
        return true;
    }
    if (word.find('.') != std::string::npos) {
        return false;  // dotted abbreviation such as u.s. or e.g.
    }
    if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0])) != 0) {
        return false;  // initial
    }
    return abbreviation_guard().count(word) == 0;
}

}  // namespace

std::vector<std::string> segment(const std::string& text) {
    std::vector<std::string> sentences;
    std::string current;
    auto flush = [&]() {
        std::string trimmed = collapse_whitespace(current);
        if (!trimmed.empty()) {
            sentences.push_back(std::move(trimmed));
        }
        current.clear();
    };

    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char ch = text[i];
        current.push_back(ch);
        bool boundary = false;
        if (ch == '!' || ch == '?') {
            boundary = true;
        } else if (ch == '.') {
            boundary = period_ends_sentence(text, i);
        }
        if (boundary) {
            while (i + 1 < n &&
                   (text[i + 1] == '"' || text[i + 1] == '\'' || text[i + 1] == ')' ||
                    text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?')) {
                current.push_back(text[++i]);
            }
            flush();
        }
    }
    flush();
    return sentences;
}

DocumentProfile score_document(const Checkpoint& ckpt, const std::string& document_id,
                               const std::string& text, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw ArgumentError("confidence threshold must lie in [0, 1]");
    }
    DocumentProfile profile;
    profile.document_id = document_id;
    profile.confidence_threshold = tau;

    auto sentences = segment(text);
    profile.n_sentences = sentences.size();
    if (sentences.empty()) {
        return profile;
    }

    auto predictions = predict(ckpt, sentences);
    std::map<CLTLabel, std::size_t> confident_counts;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        SentenceResult result;
        result.text = sentences[i];
        result.prediction = predictions[i];
        const double top = predictions[i].probabilities.maxCoeff();
        result.confident = top >= tau;
        if (result.confident) {
            ++profile.n_confident;
            ++confident_counts[predictions[i].label];
        }
        profile.sentence_results.push_back(std::move(result));
    }
    for (const auto& [label, count] : confident_counts) {
        profile.tactic_frequencies[label] =
            static_cast<double>(count) / static_cast<double>(profile.n_confident);
    }
    return profile;
}

nlohmann::ordered_json document_profile_to_json(const DocumentProfile& profile) {
    nlohmann::ordered_json object;
    object["document_id"] = profile.document_id;
    object["confidence_threshold"] = profile.confidence_threshold;
    object["n_sentences"] = profile.n_sentences;
    object["n_confident"] = profile.n_confident;

    nlohmann::ordered_json frequencies = nlohmann::ordered_json::object();
    for (const auto& [label, freq] : profile.tactic_frequencies) {
        frequencies[std::string(label_name(label))] = freq;
    }
    object["tactic_frequencies"] = frequencies;

    nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
    for (const auto& result : profile.sentence_results) {
        nlohmann::ordered_json row;
        row["text"] = result.text;
        row["label"] = std::string(label_name(result.prediction.label));
        row["confident"] = result.confident;
        nlohmann::ordered_json probs = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < result.prediction.probabilities.size(); ++i) {
            probs.push_back(result.prediction.probabilities(i));
        }
        row["probabilities"] = probs;
        sentences.push_back(std::move(row));
    }
    object["sentences"] = sentences;
    return object;
}

}  // namespace charisma
