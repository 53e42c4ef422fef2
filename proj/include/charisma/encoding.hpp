#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace charisma {

struct EncodingConfig {
    std::string vocab_path;
    bool lowercase = true;  // uncased scheme; kept for the config snapshot
    int max_length = 64;
    std::string pad_token = "[PAD]";
    std::string unk_token = "[UNK]";
    std::string cls_token = "[CLS]";
    std::string sep_token = "[SEP]";
};

nlohmann::ordered_json encoding_config_to_json(const EncodingConfig& config);
EncodingConfig encoding_config_from_json(const nlohmann::ordered_json& object);

// Plain-text vocabulary, one piece per line, line index = id.
class Vocabulary {
public:
    static Vocabulary from_file(const std::string& path);
    static Vocabulary from_lines(const std::vector<std::string>& lines);

    std::optional<int> id_of(const std::string& piece) const;
    const std::string& piece(int id) const;
    int size() const { return static_cast<int>(pieces_.size()); }

private:
    std::vector<std::string> pieces_;
    std::unordered_map<std::string, int> index_;
};

struct TokenSequence {
    std::vector<int> ids;  // [CLS] ... [SEP], length <= max_length
    int length() const { return static_cast<int>(ids.size()); }
};

// Fixed-shape model input. Mask rows are a prefix of ones; ids under a
// zero mask hold the pad id.
struct TokenizedBatch {
    Eigen::MatrixXi ids;             // B x L
    Eigen::MatrixXi attention_mask;  // B x L
    Eigen::VectorXi labels;          // B label indices
    int padded_length = 0;           // L
};

// Uncased WordPiece against a fixed vocabulary: lowercase + accent fold,
// whitespace/punctuation split, then greedy longest-match-first with "##"
// continuation pieces. Immutable after construction.
class Tokenizer {
public:
    explicit Tokenizer(const EncodingConfig& config);
    Tokenizer(const EncodingConfig& config, Vocabulary vocabulary);

    TokenSequence tokenize(const std::string& text) const;

    /// Word-level pre-tokenization (after cleaning); exposed for tests.
    std::vector<std::string> basic_tokenize(const std::string& text) const;

    /// WordPiece pieces of one cleaned word; whole word becomes unk when
    /// no full segmentation exists.
    std::vector<std::string> wordpiece(const std::string& word) const;

    const Vocabulary& vocabulary() const { return vocab_; }
    const EncodingConfig& config() const { return config_; }
    int pad_id() const { return pad_id_; }
    int unk_id() const { return unk_id_; }
    int cls_id() const { return cls_id_; }
    int sep_id() const { return sep_id_; }

private:
    void resolve_specials();

    EncodingConfig config_;
    Vocabulary vocab_;
    int pad_id_ = -1;
    int unk_id_ = -1;
    int cls_id_ = -1;
    int sep_id_ = -1;
};

/// Rejoins pieces (stripping "##") into the original cleaned word.
std::string detokenize_pieces(const std::vector<std::string>& pieces);

// Pads to L = min(longest sequence, max_length); longer rows are
// truncated again with their trailing sep kept.
TokenizedBatch pad_batch(const EncodingConfig& config, const Tokenizer& tokenizer,
                         const std::vector<TokenSequence>& sequences,
                         const std::vector<int>& labels);

}  // namespace charisma
