#include "charisma/encoding.hpp"

#include <cctype>
#include <fstream>

#include "charisma/errors.hpp"

namespace charisma {

namespace {

constexpr std::size_t kMaxWordChars = 100;  // longer words become unk outright

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c) != 0; }

// Accent folding for the Latin-1 supplement, mirroring the uncased
// scheme's strip-accents step for the characters this corpus meets.
// Returns the replacement or empty when the char passes through.
std::string fold_latin1(unsigned int cp) {
    if (cp >= 0xC0 && cp <= 0xC6) return "a";
    if (cp == 0xC7) return "c";
    if (cp >= 0xC8 && cp <= 0xCB) return "e";
    if (cp >= 0xCC && cp <= 0xCF) return "i";
    if (cp == 0xD1) return "n";
    if ((cp >= 0xD2 && cp <= 0xD6) || cp == 0xD8) return "o";
    if (cp >= 0xD9 && cp <= 0xDC) return "u";
    if (cp == 0xDD) return "y";
    if (cp >= 0xE0 && cp <= 0xE6) return "a";
    if (cp == 0xE7) return "c";
    if (cp >= 0xE8 && cp <= 0xEB) return "e";
    if (cp >= 0xEC && cp <= 0xEF) return "i";
    if (cp == 0xF1) return "n";
    if ((cp >= 0xF2 && cp <= 0xF6) || cp == 0xF8) return "o";
    if (cp >= 0xF9 && cp <= 0xFC) return "u";
    if (cp == 0xFD || cp == 0xFF) return "y";
    return {};
}

// Decodes one UTF-8 code point at i; advances i. Invalid bytes decode as
// themselves so tokenization never fails on mojibake.
unsigned int next_codepoint(const std::string& text, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = 0;
    unsigned int cp = 0;
    if ((c & 0xE0) == 0xC0) {
        extra = 1;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        extra = 2;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        extra = 3;
        cp = c & 0x07;
    } else {
        ++i;
        return c;
    }
    if (i + static_cast<std::size_t>(extra) >= text.size() + 1) {
        ++i;
        return c;
    }
    std::size_t start = i;
    ++i;
    for (int k = 0; k < extra; ++k) {
        if (i >= text.size() ||
            (static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            i = start + 1;
            return c;
        }
        cp = (cp << 6) | (static_cast<unsigned char>(text[i]) & 0x3F);
        ++i;
    }
    return cp;
}

void append_codepoint(std::string& out, unsigned int cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::size_t utf8_length(const std::string& word) {
    std::size_t n = 0;
    for (char c : word) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

// Steps one UTF-8 char back from byte position i (> 0).
std::size_t previous_char_boundary(const std::string& text, std::size_t i) {
    --i;
    while (i > 0 && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) {
        --i;
    }
    return i;
}

}  // namespace

nlohmann::ordered_json encoding_config_to_json(const EncodingConfig& config) {
    nlohmann::ordered_json object;
    object["vocab_path"] = config.vocab_path;
    object["lowercase"] = config.lowercase;
    object["max_length"] = config.max_length;
    object["pad_token"] = config.pad_token;
    object["unk_token"] = config.unk_token;
    object["cls_token"] = config.cls_token;
    object["sep_token"] = config.sep_token;
    return object;
}

EncodingConfig encoding_config_from_json(const nlohmann::ordered_json& object) {
    EncodingConfig config;
    config.vocab_path = object.value("vocab_path", std::string());
    config.lowercase = object.value("lowercase", true);
    config.max_length = object.value("max_length", 64);
    config.pad_token = object.value("pad_token", std::string("[PAD]"));
    config.unk_token = object.value("unk_token", std::string("[UNK]"));
    config.cls_token = object.value("cls_token", std::string("[CLS]"));
    config.sep_token = object.value("sep_token", std::string("[SEP]"));
    return config;
}

Vocabulary Vocabulary::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open vocabulary file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    // A trailing blank line is file formatting, not an empty piece.
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    return from_lines(lines);
}

Vocabulary Vocabulary::from_lines(const std::vector<std::string>& lines) {
    Vocabulary vocab;
    vocab.pieces_ = lines;
    vocab.index_.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        vocab.index_.emplace(lines[i], static_cast<int>(i));
    }
    return vocab;
}

std::optional<int> Vocabulary::id_of(const std::string& piece) const {
    auto it = index_.find(piece);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const std::string& Vocabulary::piece(int id) const {
    if (id < 0 || id >= size()) {
        throw ArgumentError("vocabulary id out of range: " + std::to_string(id));
    }
    return pieces_[static_cast<std::size_t>(id)];
}

Tokenizer::Tokenizer(const EncodingConfig& config)
    : Tokenizer(config, Vocabulary::from_file(config.vocab_path)) {}

Tokenizer::Tokenizer(const EncodingConfig& config, Vocabulary vocabulary)
    : config_(config), vocab_(std::move(vocabulary)) {
    if (config_.max_length < 3) {
        throw ArgumentError("max_length must be >= 3");
    }
    resolve_specials();
}

void Tokenizer::resolve_specials() {
    auto require = [&](const std::string& token) {
        auto id = vocab_.id_of(token);
        if (!id) {
            throw ConfigError("special token " + token + " missing from vocabulary");
        }
        return *id;
    };
    pad_id_ = require(config_.pad_token);
    unk_id_ = require(config_.unk_token);
    cls_id_ = require(config_.cls_token);
    sep_id_ = require(config_.sep_token);
}

std::vector<std::string> Tokenizer::basic_tokenize(const std::string& text) const {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned int cp = next_codepoint(text, i);
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0) {
            flush();
            continue;
        }
        if (cp < 0x80 && is_ascii_punct(static_cast<unsigned char>(cp))) {
            flush();
            words.push_back(std::string(1, static_cast<char>(cp)));
            continue;
        }
        if (cp < 0x80) {
            current.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(cp))));
            continue;
        }
        std::string folded = fold_latin1(cp);
        if (!folded.empty()) {
            current += folded;
        } else {
            append_codepoint(current, cp);
        }
    }
    flush();
    return words;
}

std::vector<std::string> Tokenizer::wordpiece(const std::string& word) const {
    if (utf8_length(word) > kMaxWordChars) {
        return {config_.unk_token};
    }
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start < word.size()) {
        std::size_t end = word.size();
        std::string found;
        while (end > start) {
            std::string candidate = word.substr(start, end - start);
            if (start > 0) {
                candidate = "##" + candidate;
            }
            if (vocab_.id_of(candidate)) {
                found = std::move(candidate);
                break;
            }
            end = previous_char_boundary(word, end);
        }
        if (found.empty()) {
            return {config_.unk_token};  // no full segmentation: whole word is unk
        }
        pieces.push_back(std::move(found));
        start = end;
    }
    return pieces;
}

TokenSequence Tokenizer::tokenize(const std::string& text) const {
    std::vector<int> content;
    for (const auto& word : basic_tokenize(text)) {
        for (const auto& piece : wordpiece(word)) {
            auto id = vocab_.id_of(piece);
            content.push_back(id ? *id : unk_id_);
        }
    }
    const auto limit = static_cast<std::size_t>(config_.max_length) - 2;
    if (content.size() > limit) {
        content.resize(limit);
    }
    TokenSequence sequence;
    sequence.ids.reserve(content.size() + 2);
    sequence.ids.push_back(cls_id_);
    sequence.ids.insert(sequence.ids.end(), content.begin(), content.end());
    sequence.ids.push_back(sep_id_);
    return sequence;
}

std::string detokenize_pieces(const std::vector<std::string>& pieces) {
    std::string word;
    for (const auto& piece : pieces) {
        if (piece.rfind("##", 0) == 0) {
            word += piece.substr(2);
        } else {
            word += piece;
        }
    }
    return word;
}

TokenizedBatch pad_batch(const EncodingConfig& config, const Tokenizer& tokenizer,
                         const std::vector<TokenSequence>& sequences,
                         const std::vector<int>& labels) {
    if (sequences.empty()) {
        throw ArgumentError("pad_batch needs at least one sequence");
    }
    if (sequences.size() != labels.size()) {
        throw ArgumentError("sequence/label count mismatch: " +
                            std::to_string(sequences.size()) + " vs " +
                            std::to_string(labels.size()));
    }
    int longest = 0;
    for (const auto& sequence : sequences) {
        longest = std::max(longest, sequence.length());
    }
    const int padded = std::min(longest, config.max_length);
    const auto batch_size = static_cast<Eigen::Index>(sequences.size());

    TokenizedBatch batch;
    batch.padded_length = padded;
    batch.ids = Eigen::MatrixXi::Constant(batch_size, padded, tokenizer.pad_id());
    batch.attention_mask = Eigen::MatrixXi::Zero(batch_size, padded);
    batch.labels = Eigen::VectorXi(batch_size);

    for (Eigen::Index row = 0; row < batch_size; ++row) {
        const auto& ids = sequences[static_cast<std::size_t>(row)].ids;
        int n = static_cast<int>(ids.size());
        if (n > padded) {
            // Truncate but keep the trailing sep.
            for (int col = 0; col < padded - 1; ++col) {
                batch.ids(row, col) = ids[static_cast<std::size_t>(col)];
            }
            batch.ids(row, padded - 1) = tokenizer.sep_id();
            n = padded;
        } else {
            for (int col = 0; col < n; ++col) {
                batch.ids(row, col) = ids[static_cast<std::size_t>(col)];
            }
        }
        batch.attention_mask.row(row).head(n).setOnes();
        batch.labels(row) = labels[static_cast<std::size_t>(row)];
    }
    return batch;
}

}  // namespace charisma
