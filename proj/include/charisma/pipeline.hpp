#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "charisma/classifier.hpp"
#include "charisma/dataset.hpp"
#include "charisma/encoding.hpp"
#include "charisma/llm_client.hpp"

namespace charisma {

// One config file drives every pipeline stage; CLI flags override single
// fields. The effective values are echoed into each output manifest.
struct PipelineConfig {
    LLMClientConfig client;
    SplitSpec split;
    EncodingConfig encoding;
    TrainingConfig training;
    std::string train_path;
    std::string val_path;
    std::string test_path;
    double tau = 0.5;
    std::string output_dir = "out";
};

nlohmann::ordered_json pipeline_config_to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const nlohmann::ordered_json& object);

// ConfigError on unreadable files, JSON syntax errors and unknown
// top-level sections.
PipelineConfig load_pipeline_config(const std::string& path);

// Deterministic run manifest: effective config plus a digest per input.
nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& effective_config,
                                     const std::vector<std::string>& input_paths,
                                     const std::vector<std::string>& output_paths);

void write_manifest(const std::string& path, const nlohmann::ordered_json& manifest);

}  // namespace charisma
