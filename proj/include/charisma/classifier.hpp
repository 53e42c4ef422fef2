#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "charisma/corpus.hpp"
#include "charisma/encoding.hpp"
#include "charisma/model.hpp"
#include "charisma/optim.hpp"

namespace charisma {

struct TrainingConfig {
    double learning_rate = 5e-5;
    int epochs = 100;
    int batch_size = 32;
    std::uint64_t seed = 0;
    std::string encoder_name = "mini-uncased";
    int num_labels = kNumLabels;
    bool freeze_encoder = false;
    // Moment and decay settings; learning_rate above wins over the one
    // inside. Defaults are the framework defaults and go into the
    // checkpoint manifest verbatim.
    AdamWConfig optimizer;
    std::string best_checkpoint_metric = "val_accuracy";
};

void validate_training_config(const TrainingConfig& config);

nlohmann::ordered_json training_config_to_json(const TrainingConfig& config);
TrainingConfig training_config_from_json(const nlohmann::ordered_json& object);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double seconds = 0.0;
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
};

nlohmann::ordered_json history_to_json(const TrainingHistory& history);
TrainingHistory history_from_json(const nlohmann::ordered_json& object);

struct Prediction {
    CLTLabel label = CLTLabel::metaphor_simile;
    Eigen::VectorXd probabilities;
    Eigen::VectorXd logits;
};

struct Checkpoint {
    EncoderSpec spec;
    ModelParams<float> params;
    EncodingConfig encoding;
    TrainingConfig training;
    std::vector<std::string> vocab_lines;
    std::vector<CLTLabel> label_order;  // head index -> label
    TrainingHistory history;
};

struct TrainResult {
    Checkpoint best;
    Checkpoint last;
    TrainingHistory history;
};

// Fine-tunes the encoder plus head on train, monitoring val each epoch.
// Deterministic given the seed. Keeps both the best-validation-accuracy
// snapshot and the final epoch. Non-finite losses stop the run with a
// DivergenceError naming the epoch.
TrainResult train(const Corpus& train_corpus, const Corpus& val_corpus,
                  const EncodingConfig& enc, const TrainingConfig& cfg);

// Order-preserving batch inference. Probabilities are the softmax of the
// logits; ties break toward the lowest head index.
std::vector<Prediction> predict(const Checkpoint& ckpt,
                                const std::vector<std::string>& texts);

// Checkpoint directory layout: manifest.json, weights.bin, history.json,
// vocab.txt. Loading validates magic, version, digest and label bijection
// and throws CheckpointError without partial state on any mismatch.
void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace charisma
