#include "test_corpus.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "charisma/text_norm.hpp"

namespace charisma::testsupport {

namespace {

const std::vector<std::string> kNouns = {
    "bridge",  "harvest",   "engine", "garden",  "voyage",      "ledger",
    "horizon", "workshop",  "harbor", "orchard", "summit",      "archive",
    "furnace", "meadow",    "compass", "granary", "village",    "reservoir",
    "quarry",  "lantern",   "mill",    "causeway", "observatory", "beacon"};

const std::vector<std::string> kAdjectives = {"steady", "bright", "patient",
                                              "sturdy", "quiet",  "bold",
                                              "careful", "vivid", "calm", "eager"};

// {n}, {m}, {p} draw nouns, {a} draws an adjective. Marker words are
// exclusive to their family.
const std::vector<std::vector<std::string>> kTemplates = {
    // metaphor_simile
    {"Our {a} team moves like a {n} in spring.",
     "The plan works like a {n} feeding a {m}.",
     "As a {n} guides the {m}, this roadmap guides us."},
    // rhetorical_question
    {"Why would the {n} wait for another {m}?",
     "Who among us questions the {a} {n}?",
     "What stops a {a} {n} from growing?"},
    // story_anecdote
    {"Years ago a mentor showed me a {a} {n}.",
     "I remember the morning our {n} first reached the {m}.",
     "Once, during a long winter, the {n} kept the {m} alive."},
    // contrast
    {"We choose the {n}, not the {m}.",
     "Better a {a} {n} than a hollow {m}.",
     "It is the {n} we want, instead of the {m}."},
    // lists_repetitions
    {"We bring the {n}, the {m}, and the {p}.",
     "Step by step, piece by piece, the {n} takes shape.",
     "First the {n}, then the {m}, then the {p}."},
    // sentiment_of_the_collective
    {"Together we tend the {n} that belongs to us all.",
     "Our shared {n} binds every {m} here.",
     "All of us stand behind the {a} {n}."},
    // moral_conviction
    {"It is simply right to protect the {a} {n}.",
     "We owe an honest duty to the {n}.",
     "Defending the {n} is the fair and decent thing."},
    // ambitious_goals
    {"Within a decade we will build the largest {n}.",
     "Our aim is to double the {n} and expand the {m}.",
     "We set out to transform the {n} entirely."},
    // confidence_in_goals
    {"I am certain the {n} will be finished on schedule.",
     "No doubt remains that our {n} will succeed.",
     "We are fully confident in the {a} {n}."},
};

std::string fill_template(const std::string& tmpl, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> noun_pick(0, kNouns.size() - 1);
    std::uniform_int_distribution<std::size_t> adj_pick(0, kAdjectives.size() - 1);
    std::string out;
    out.reserve(tmpl.size() + 32);
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
            const char slot = tmpl[i + 1];
            if (slot == 'a') {
                out += kAdjectives[adj_pick(rng)];
            } else {
                out += kNouns[noun_pick(rng)];
            }
            i += 2;
        } else {
            out += tmpl[i];
        }
    }
    return out;
}

}  // namespace

Corpus synthetic_corpus(std::size_t per_class, std::uint64_t seed) {
    Corpus corpus;
    std::mt19937_64 rng(seed);
    const auto labels = all_labels();
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const auto& family = kTemplates[c];
        std::uniform_int_distribution<std::size_t> tmpl_pick(0, family.size() - 1);
        std::set<std::string> seen;
        std::size_t serial = 0;
        std::size_t guard = 0;
        while (seen.size() < per_class) {
            if (++guard > per_class * 1000) {
                throw std::runtime_error("template family " + std::to_string(c) +
                                         " cannot yield " + std::to_string(per_class) +
                                         " unique sentences");
            }
            std::string text = fill_template(family[tmpl_pick(rng)], rng);
            if (!seen.insert(normalize_for_dedup(text)).second) {
                continue;
            }
            LabeledSentence s;
            s.id = "syn-" + std::string(label_name(labels[c])) + "-" +
                   std::to_string(serial++);
            s.text = std::move(text);
            s.label = labels[c];
            s.source = SentenceSource::generated;
            corpus.sentences.push_back(std::move(s));
        }
    }
    return corpus;
}

std::vector<std::string> build_vocab_lines(const Corpus& corpus,
                                           const EncodingConfig& config) {
    EncodingConfig probe = config;
    probe.vocab_path.clear();
    Tokenizer splitter(probe, Vocabulary::from_lines({config.pad_token, config.unk_token,
                                                      config.cls_token,
                                                      config.sep_token}));
    std::set<std::string> words;
    for (const auto& s : corpus.sentences) {
        for (const auto& token : splitter.basic_tokenize(s.text)) {
            words.insert(token);
        }
    }
    std::vector<std::string> lines = {config.pad_token, config.unk_token,
                                      config.cls_token, config.sep_token};
    lines.insert(lines.end(), words.begin(), words.end());
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    for (const auto& line : lines) {
        out << line << '\n';
    }
}

std::string make_temp_dir(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    namespace fs = std::filesystem;
    const auto base = fs::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        fs::path candidate =
            base / (prefix + "-" + std::to_string(rd()) + "-" +
                    std::to_string(counter.fetch_add(1)));
        std::error_code ec;
        if (fs::create_directory(candidate, ec)) {
            return candidate.string();
        }
    }
    throw std::runtime_error("cannot create a temp directory under " + base.string());
}

}  // namespace charisma::testsupport
