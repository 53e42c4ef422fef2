#include "charisma/classifier.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "charisma/dataset.hpp"
#include "charisma/digest.hpp"

namespace charisma {

namespace fs = std::filesystem;

namespace {

constexpr char kWeightsMagic[4] = {'C', 'L', 'T', 'W'};
constexpr std::uint32_t kWeightsVersion = 1;

nlohmann::ordered_json encoder_spec_to_json(const EncoderSpec& spec) {
    nlohmann::ordered_json object;
    object["name"] = spec.name;
    object["vocab_size"] = spec.vocab_size;
    object["hidden_size"] = spec.hidden_size;
    object["num_layers"] = spec.num_layers;
    object["num_heads"] = spec.num_heads;
    object["intermediate_size"] = spec.intermediate_size;
    object["max_position"] = spec.max_position;
    object["num_classes"] = spec.num_classes;
    object["layer_norm_eps"] = spec.layer_norm_eps;
    return object;
}

EncoderSpec encoder_spec_from_json(const nlohmann::ordered_json& object) {
    EncoderSpec spec;
    spec.name = object.at("name").get<std::string>();
    spec.vocab_size = object.at("vocab_size").get<int>();
    spec.hidden_size = object.at("hidden_size").get<int>();
    spec.num_layers = object.at("num_layers").get<int>();
    spec.num_heads = object.at("num_heads").get<int>();
    spec.intermediate_size = object.at("intermediate_size").get<int>();
    spec.max_position = object.at("max_position").get<int>();
    spec.num_classes = object.at("num_classes").get<int>();
    spec.layer_norm_eps = object.at("layer_norm_eps").get<double>();
    return spec;
}

// Parameter storage with the right shapes and no values yet.
ModelParams<float> shaped_parameters(const EncoderSpec& spec) {
    const int h = spec.hidden_size;
    ModelParams<float> p;
    p.token_embedding = Mat<float>::Zero(spec.vocab_size, h);
    p.position_embedding = Mat<float>::Zero(spec.max_position, h);
    p.emb_ln_gamma = Vec<float>::Zero(h);
    p.emb_ln_beta = Vec<float>::Zero(h);
    p.layers.resize(static_cast<std::size_t>(spec.num_layers));
    for (auto& layer : p.layers) {
        layer.wq = Mat<float>::Zero(h, h);
        layer.wk = Mat<float>::Zero(h, h);
        layer.wv = Mat<float>::Zero(h, h);
        layer.wo = Mat<float>::Zero(h, h);
        layer.bq = Vec<float>::Zero(h);
        layer.bk = Vec<float>::Zero(h);
        layer.bv = Vec<float>::Zero(h);
        layer.bo = Vec<float>::Zero(h);
        layer.ln1_gamma = Vec<float>::Zero(h);
        layer.ln1_beta = Vec<float>::Zero(h);
        layer.w1 = Mat<float>::Zero(h, spec.intermediate_size);
        layer.b1 = Vec<float>::Zero(spec.intermediate_size);
        layer.w2 = Mat<float>::Zero(spec.intermediate_size, h);
        layer.b2 = Vec<float>::Zero(h);
        layer.ln2_gamma = Vec<float>::Zero(h);
        layer.ln2_beta = Vec<float>::Zero(h);
    }
    p.pooler_w = Mat<float>::Zero(h, h);
    p.pooler_b = Vec<float>::Zero(h);
    p.head_w = Mat<float>::Zero(h, spec.num_classes);
    p.head_b = Vec<float>::Zero(spec.num_classes);
    return p;
}

void write_weights(const ModelParams<float>& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out.write(kWeightsMagic, 4);
    auto write_u32 = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    auto write_u64 = [&](std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    write_u32(kWeightsVersion);
    write_u32(sizeof(float));
    std::uint64_t count = 0;
    visit_parameters(params, [&](const auto&) { ++count; });
    write_u64(count);
    visit_parameters(params, [&](const auto& m) {
        write_u64(static_cast<std::uint64_t>(m.rows()));
        write_u64(static_cast<std::uint64_t>(m.cols()));
        out.write(reinterpret_cast<const char*>(m.data()),
                  static_cast<std::streamsize>(m.size() * sizeof(float)));
    });
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

ModelParams<float> read_weights(const EncoderSpec& spec, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open weights file " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kWeightsMagic, 4) != 0) {
        throw CheckpointError("weights file has wrong magic: " + path);
    }
    auto read_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    auto read_u64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    const std::uint32_t version = read_u32();
    if (!in || version != kWeightsVersion) {
        throw CheckpointError("unsupported weights version " + std::to_string(version));
    }
    const std::uint32_t scalar_bytes = read_u32();
    if (!in || scalar_bytes != sizeof(float)) {
        throw CheckpointError("weights scalar width mismatch");
    }
    ModelParams<float> params = shaped_parameters(spec);
    std::uint64_t expected = 0;
    visit_parameters(params, [&](const auto&) { ++expected; });
    const std::uint64_t count = read_u64();
    if (!in || count != expected) {
        throw CheckpointError("weights tensor count mismatch: file has " +
                              std::to_string(count) + ", architecture needs " +
                              std::to_string(expected));
    }
    visit_parameters(params, [&](auto& m) {
        const std::uint64_t rows = read_u64();
        const std::uint64_t cols = read_u64();
        if (!in || rows != static_cast<std::uint64_t>(m.rows()) ||
            cols != static_cast<std::uint64_t>(m.cols())) {
            throw CheckpointError("weights tensor shape mismatch");
        }
        in.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(float)));
        if (!in) {
            throw CheckpointError("weights file truncated");
        }
    });
    return params;
}

std::vector<std::string> vocabulary_lines(const Vocabulary& vocab) {
    std::vector<std::string> lines;
    lines.reserve(static_cast<std::size_t>(vocab.size()));
    for (int i = 0; i < vocab.size(); ++i) {
        lines.push_back(vocab.piece(i));
    }
    return lines;
}

std::vector<int> row_ids(const TokenizedBatch& batch, Eigen::Index row) {
    const int length = batch.attention_mask.row(row).sum();
    std::vector<int> ids(static_cast<std::size_t>(length));
    for (int col = 0; col < length; ++col) {
        ids[static_cast<std::size_t>(col)] = batch.ids(row, col);
    }
    return ids;
}

int argmax_lowest(const RowVec<float>& logits) {
    int best = 0;
    for (int i = 1; i < logits.size(); ++i) {
        if (logits(i) > logits(best)) {
            best = i;
        }
    }
    return best;
}

}  // namespace

void validate_training_config(const TrainingConfig& config) {
    if (!(config.learning_rate > 0)) {
        throw ArgumentError("learning_rate must be positive");
    }
    if (config.epochs < 1) {
        throw ArgumentError("epochs must be >= 1");
    }
    if (config.batch_size < 1) {
        throw ArgumentError("batch_size must be >= 1");
    }
    if (config.num_labels != kNumLabels) {
        throw ArgumentError("num_labels is fixed at " + std::to_string(kNumLabels));
    }
}

nlohmann::ordered_json training_config_to_json(const TrainingConfig& config) {
    nlohmann::ordered_json object;
    object["learning_rate"] = config.learning_rate;
    object["epochs"] = config.epochs;
    object["batch_size"] = config.batch_size;
    object["seed"] = config.seed;
    object["encoder_name"] = config.encoder_name;
    object["num_labels"] = config.num_labels;
    object["freeze_encoder"] = config.freeze_encoder;
    object["best_checkpoint_metric"] = config.best_checkpoint_metric;
    object["optimizer"] = {{"name", "adamw"},
                           {"beta1", config.optimizer.beta1},
                           {"beta2", config.optimizer.beta2},
                           {"eps", config.optimizer.eps},
                           {"weight_decay", config.optimizer.weight_decay}};
    return object;
}

TrainingConfig training_config_from_json(const nlohmann::ordered_json& object) {
    TrainingConfig config;
    config.learning_rate = object.value("learning_rate", config.learning_rate);
    config.epochs = object.value("epochs", config.epochs);
    config.batch_size = object.value("batch_size", config.batch_size);
    config.seed = object.value("seed", config.seed);
    config.encoder_name = object.value("encoder_name", config.encoder_name);
    config.num_labels = object.value("num_labels", config.num_labels);
    config.freeze_encoder = object.value("freeze_encoder", config.freeze_encoder);
    config.best_checkpoint_metric =
        object.value("best_checkpoint_metric", config.best_checkpoint_metric);
    if (object.contains("optimizer")) {
        const auto& opt = object.at("optimizer");
        config.optimizer.beta1 = opt.value("beta1", config.optimizer.beta1);
        config.optimizer.beta2 = opt.value("beta2", config.optimizer.beta2);
        config.optimizer.eps = opt.value("eps", config.optimizer.eps);
        config.optimizer.weight_decay =
            opt.value("weight_decay", config.optimizer.weight_decay);
    }
    return config;
}

nlohmann::ordered_json history_to_json(const TrainingHistory& history) {
    nlohmann::ordered_json object;
    object["best_epoch"] = history.best_epoch;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& r : history.epochs) {
        records.push_back({{"epoch", r.epoch},
                           {"train_loss", r.train_loss},
                           {"val_loss", r.val_loss},
                           {"val_accuracy", r.val_accuracy},
                           {"seconds", r.seconds}});
    }
    object["epochs"] = records;
    return object;
}

TrainingHistory history_from_json(const nlohmann::ordered_json& object) {
    TrainingHistory history;
    history.best_epoch = object.value("best_epoch", 0);
    for (const auto& r : object.at("epochs")) {
        EpochRecord record;
        record.epoch = r.at("epoch").get<int>();
        record.train_loss = r.at("train_loss").get<double>();
        record.val_loss = r.at("val_loss").get<double>();
        record.val_accuracy = r.at("val_accuracy").get<double>();
        record.seconds = r.value("seconds", 0.0);
        history.epochs.push_back(record);
    }
    return history;
}

TrainResult train(const Corpus& train_corpus, const Corpus& val_corpus,
                  const EncodingConfig& enc, const TrainingConfig& cfg) {
    validate_training_config(cfg);
    if (train_corpus.empty()) {
        throw ArgumentError("training corpus is empty");
    }

    std::map<CLTLabel, std::size_t> label_counts;
    for (const auto& s : train_corpus.sentences) {
        ++label_counts[s.label];
    }
    for (CLTLabel label : all_labels()) {
        if (label_counts.find(label) == label_counts.end()) {
            std::cerr << "note: class " << label_name(label)
                      << " is absent from the training data\n";
        }
    }

    Tokenizer tokenizer(enc);
    EncoderSpec spec = encoder_preset(cfg.encoder_name);
    spec.vocab_size = tokenizer.vocabulary().size();
    spec.num_classes = cfg.num_labels;
    if (enc.max_length > spec.max_position) {
        throw ConfigError("max_length " + std::to_string(enc.max_length) +
                          " exceeds the encoder's max_position " +
                          std::to_string(spec.max_position));
    }

    auto encode_corpus = [&](const Corpus& corpus) {
        std::pair<std::vector<TokenSequence>, std::vector<int>> out;
        out.first.reserve(corpus.size());
        out.second.reserve(corpus.size());
        for (const auto& s : corpus.sentences) {
            out.first.push_back(tokenizer.tokenize(s.text));
            out.second.push_back(label_index(s.label));
        }
        return out;
    };
    auto [train_seqs, train_labels] = encode_corpus(train_corpus);
    auto [val_seqs, val_labels] = encode_corpus(val_corpus);
    const std::size_t n_train = train_seqs.size();

    ModelParams<float> params = init_parameters<float>(spec, cfg.seed);
    ModelParams<float> grads = zeros_like(params);
    AdamWConfig opt_cfg = cfg.optimizer;
    opt_cfg.learning_rate = cfg.learning_rate;
    AdamW<float> optimizer(opt_cfg);
    auto param_views =
        cfg.freeze_encoder ? head_parameter_views(params) : parameter_views(params);
    auto grad_views =
        cfg.freeze_encoder ? head_parameter_views(grads) : parameter_views(grads);

    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainingHistory history;
    ModelParams<float> best_params = params;
    double best_accuracy = -1.0;
    int best_epoch = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        deterministic_shuffle(order, shuffle_rng);

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < n_train;
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(n_train, begin + static_cast<std::size_t>(cfg.batch_size));
            std::vector<TokenSequence> seqs;
            std::vector<int> labels;
            seqs.reserve(end - begin);
            labels.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                seqs.push_back(train_seqs[order[i]]);
                labels.push_back(train_labels[order[i]]);
            }
            TokenizedBatch batch = pad_batch(enc, tokenizer, seqs, labels);

            visit_parameters(grads, [](auto& m) { m.setZero(); });
            const float inv = 1.0f / static_cast<float>(batch.ids.rows());
            for (Eigen::Index row = 0; row < batch.ids.rows(); ++row) {
                SequenceCache<float> cache;
                RowVec<float> logits =
                    forward_sequence(spec, params, row_ids(batch, row), &cache);
                RowVec<float> dlogits;
                loss_sum += cross_entropy(logits, batch.labels(row), &dlogits);
                dlogits *= inv;
                backward_sequence(spec, params, cache, dlogits, grads);
            }
            optimizer.step(param_views, grad_views);
        }
        const double train_loss = loss_sum / static_cast<double>(n_train);

        double val_loss = 0.0;
        double val_accuracy = 0.0;
        if (!val_seqs.empty()) {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < val_seqs.size(); ++i) {
                RowVec<float> logits = forward_sequence(spec, params, val_seqs[i].ids);
                val_loss += cross_entropy(logits, val_labels[i]);
                if (argmax_lowest(logits) == val_labels[i]) {
                    ++correct;
                }
            }
            val_loss /= static_cast<double>(val_seqs.size());
            val_accuracy = static_cast<double>(correct) /
                           static_cast<double>(val_seqs.size());
        }

        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch),
                                  epoch);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = train_loss;
        record.val_loss = val_loss;
        record.val_accuracy = val_accuracy;
        record.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        history.epochs.push_back(record);

        if (!val_seqs.empty() && val_accuracy > best_accuracy) {
            best_accuracy = val_accuracy;
            best_params = params;
            best_epoch = epoch;
        }
    }
    if (val_seqs.empty()) {
        best_params = params;
        best_epoch = cfg.epochs;
    }
    history.best_epoch = best_epoch;

    auto make_checkpoint = [&](ModelParams<float> snapshot) {
        Checkpoint ckpt;
        ckpt.spec = spec;
        ckpt.params = std::move(snapshot);
        ckpt.encoding = enc;
        ckpt.training = cfg;
        ckpt.vocab_lines = vocabulary_lines(tokenizer.vocabulary());
        auto labels = all_labels();
        ckpt.label_order.assign(labels.begin(), labels.end());
        ckpt.history = history;
        return ckpt;
    };

    TrainResult result;
    result.best = make_checkpoint(std::move(best_params));
    result.last = make_checkpoint(std::move(params));
    result.history = history;
    return result;
}

std::vector<Prediction> predict(const Checkpoint& ckpt,
                                const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw ArgumentError("predict needs at least one sentence");
    }
    if (ckpt.label_order.size() != static_cast<std::size_t>(ckpt.spec.num_classes)) {
        throw CheckpointError("label order does not match the head size");
    }
    Tokenizer tokenizer(ckpt.encoding, Vocabulary::from_lines(ckpt.vocab_lines));

    std::vector<Prediction> predictions;
    predictions.reserve(texts.size());
    for (const auto& text : texts) {
        TokenSequence seq = tokenizer.tokenize(text);
        RowVec<float> logits = forward_sequence(ckpt.spec, ckpt.params, seq.ids);
        Mat<float> probs = softmax_rows(logits);
        Prediction pred;
        pred.label = ckpt.label_order[static_cast<std::size_t>(argmax_lowest(logits))];
        pred.logits = logits.transpose().cast<double>();
        pred.probabilities = probs.row(0).transpose().cast<double>();
        predictions.push_back(std::move(pred));
    }
    return predictions;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
    fs::create_directories(dir);
    const std::string weights_path = dir + "/weights.bin";
    write_weights(ckpt.params, weights_path);

    {
        std::ofstream vocab_out(dir + "/vocab.txt", std::ios::binary | std::ios::trunc);
        if (!vocab_out) {
            throw IoError("cannot write " + dir + "/vocab.txt");
        }
        for (const auto& line : ckpt.vocab_lines) {
            vocab_out << line << '\n';
        }
    }
    {
        std::ofstream history_out(dir + "/history.json", std::ios::trunc);
        if (!history_out) {
            throw IoError("cannot write " + dir + "/history.json");
        }
        history_out << history_to_json(ckpt.history).dump(2) << '\n';
    }

    nlohmann::ordered_json manifest;
    manifest["format_version"] = 1;
    manifest["scalar"] = "float32";
    manifest["encoder"] = encoder_spec_to_json(ckpt.spec);
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (CLTLabel label : ckpt.label_order) {
        labels.push_back(std::string(label_name(label)));
    }
    manifest["labels"] = labels;
    manifest["encoding"] = encoding_config_to_json(ckpt.encoding);
    manifest["training"] = training_config_to_json(ckpt.training);
    manifest["weights_file"] = "weights.bin";
    manifest["weights_digest"] = file_digest(weights_path);
    manifest["history_file"] = "history.json";
    manifest["vocab_file"] = "vocab.txt";

    std::ofstream manifest_out(dir + "/manifest.json", std::ios::trunc);
    if (!manifest_out) {
        throw IoError("cannot write " + dir + "/manifest.json");
    }
    manifest_out << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& dir) {
    nlohmann::ordered_json manifest;
    {
        std::ifstream in(dir + "/manifest.json");
        if (!in) {
            throw CheckpointError("cannot open checkpoint manifest in " + dir);
        }
        try {
            in >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw CheckpointError("checkpoint manifest is not valid JSON: " +
                                  std::string(e.what()));
        }
    }

    Checkpoint ckpt;
    try {
        const int version = manifest.at("format_version").get<int>();
        if (version != 1) {
            throw CheckpointError("unsupported checkpoint format version " +
                                  std::to_string(version));
        }
        if (manifest.at("scalar").get<std::string>() != "float32") {
            throw CheckpointError("unsupported checkpoint scalar type");
        }
        ckpt.spec = encoder_spec_from_json(manifest.at("encoder"));
        validate_encoder_spec(ckpt.spec);

        const auto& labels = manifest.at("labels");
        if (labels.size() != static_cast<std::size_t>(ckpt.spec.num_classes)) {
            throw CheckpointError("label map size does not match num_classes");
        }
        std::set<CLTLabel> seen;
        for (const auto& name : labels) {
            CLTLabel label = parse_label(name.get<std::string>());
            if (!seen.insert(label).second) {
                throw CheckpointError("label map contains a duplicate: " +
                                      name.get<std::string>());
            }
            ckpt.label_order.push_back(label);
        }

        ckpt.encoding = encoding_config_from_json(manifest.at("encoding"));
        ckpt.training = training_config_from_json(manifest.at("training"));

        const std::string weights_path =
            dir + "/" + manifest.at("weights_file").get<std::string>();
        const std::string stored_digest = manifest.at("weights_digest").get<std::string>();
        if (file_digest(weights_path) != stored_digest) {
            throw CheckpointError("weights digest mismatch, checkpoint is corrupted");
        }
        ckpt.params = read_weights(ckpt.spec, weights_path);

        const std::string vocab_path =
            dir + "/" + manifest.at("vocab_file").get<std::string>();
        ckpt.vocab_lines.clear();
        {
            std::ifstream vocab_in(vocab_path, std::ios::binary);
            if (!vocab_in) {
                throw CheckpointError("cannot open checkpoint vocabulary " + vocab_path);
            }
            std::string line;
            while (std::getline(vocab_in, line)) {
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                ckpt.vocab_lines.push_back(line);
            }
            while (!ckpt.vocab_lines.empty() && ckpt.vocab_lines.back().empty()) {
                ckpt.vocab_lines.pop_back();
            }
        }
        if (ckpt.vocab_lines.size() != static_cast<std::size_t>(ckpt.spec.vocab_size)) {
            throw CheckpointError("checkpoint vocabulary size mismatch");
        }

        const std::string history_path =
            dir + "/" + manifest.at("history_file").get<std::string>();
        std::ifstream history_in(history_path);
        if (!history_in) {
            throw CheckpointError("cannot open checkpoint history " + history_path);
        }
        nlohmann::ordered_json history_json;
        history_in >> history_json;
        ckpt.history = history_from_json(history_json);
    } catch (const CheckpointError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError("checkpoint manifest is malformed: " +
                              std::string(e.what()));
    } catch (const SchemaError& e) {
        throw CheckpointError("checkpoint label map is invalid: " +
                              std::string(e.what()));
    } catch (const ConfigError& e) {
        throw CheckpointError("checkpoint declares an invalid architecture: " +
                              std::string(e.what()));
    } catch (const IoError& e) {
        throw CheckpointError(e.what());
    }
    return ckpt;
}

}  // namespace charisma
