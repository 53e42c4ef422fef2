#include "charisma/pipeline.hpp"

#include <fstream>

#include "charisma/digest.hpp"
#include "charisma/errors.hpp"

namespace charisma {

namespace {

nlohmann::ordered_json client_config_to_json(const LLMClientConfig& config) {
    nlohmann::ordered_json object;
    object["endpoint"] = config.endpoint;
    object["model_name"] = config.model_name;
    object["api_key_env"] = config.api_key_env;
    object["max_batch"] = config.max_batch;
    object["max_retries"] = config.retry.max_retries;
    object["backoff_base_seconds"] = config.retry.backoff_base_seconds;
    object["rate_limit_rpm"] = config.rate_limit_rpm;
    object["temperature"] = config.temperature;
    return object;
}

LLMClientConfig client_config_from_json(const nlohmann::ordered_json& object) {
    LLMClientConfig config;
    config.endpoint = object.value("endpoint", config.endpoint);
    config.model_name = object.value("model_name", config.model_name);
    config.api_key_env = object.value("api_key_env", config.api_key_env);
    config.max_batch = object.value("max_batch", config.max_batch);
    config.retry.max_retries = object.value("max_retries", config.retry.max_retries);
    config.retry.backoff_base_seconds =
        object.value("backoff_base_seconds", config.retry.backoff_base_seconds);
    config.rate_limit_rpm = object.value("rate_limit_rpm", config.rate_limit_rpm);
    config.temperature = object.value("temperature", config.temperature);
    return config;
}

nlohmann::ordered_json split_spec_to_json(const SplitSpec& spec) {
    nlohmann::ordered_json object;
    object["test_fraction"] = spec.test_fraction;
    object["val_fraction_of_train"] = spec.val_fraction_of_train;
    object["seed"] = spec.seed;
    object["stratified"] = spec.stratified;
    return object;
}

SplitSpec split_spec_from_json(const nlohmann::ordered_json& object) {
    SplitSpec spec;
    spec.test_fraction = object.value("test_fraction", spec.test_fraction);
    spec.val_fraction_of_train =
        object.value("val_fraction_of_train", spec.val_fraction_of_train);
    spec.seed = object.value("seed", spec.seed);
    spec.stratified = object.value("stratified", spec.stratified);
    return spec;
}

}  // namespace

nlohmann::ordered_json pipeline_config_to_json(const PipelineConfig& config) {
    nlohmann::ordered_json object;
    object["client"] = client_config_to_json(config.client);
    object["split"] = split_spec_to_json(config.split);
    object["encoding"] = encoding_config_to_json(config.encoding);
    object["training"] = training_config_to_json(config.training);
    object["data"] = {{"train", config.train_path},
                      {"val", config.val_path},
                      {"test", config.test_path}};
    object["scoring"] = {{"tau", config.tau}};
    object["output_dir"] = config.output_dir;
    return object;
}

PipelineConfig pipeline_config_from_json(const nlohmann::ordered_json& object) {
    static const char* known[] = {"client",   "split",   "encoding", "training",
                                  "data",     "scoring", "output_dir"};
    for (auto it = object.begin(); it != object.end(); ++it) {
        bool ok = false;
        for (const char* key : known) {
            if (it.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError("unknown config section: " + it.key());
        }
    }

    PipelineConfig config;
    if (object.contains("client")) {
        config.client = client_config_from_json(object.at("client"));
    }
    if (object.contains("split")) {
        config.split = split_spec_from_json(object.at("split"));
    }
    if (object.contains("encoding")) {
        config.encoding = encoding_config_from_json(object.at("encoding"));
    }
    if (object.contains("training")) {
        config.training = training_config_from_json(object.at("training"));
    }
    if (object.contains("data")) {
        const auto& data = object.at("data");
        config.train_path = data.value("train", config.train_path);
        config.val_path = data.value("val", config.val_path);
        config.test_path = data.value("test", config.test_path);
    }
    if (object.contains("scoring")) {
        config.tau = object.at("scoring").value("tau", config.tau);
    }
    config.output_dir = object.value("output_dir", config.output_dir);
    return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    nlohmann::ordered_json object;
    try {
        in >> object;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!object.is_object()) {
        throw ConfigError("config file " + path + " must hold a JSON object");
    }
    try {
        return pipeline_config_from_json(object);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is malformed: " + e.what());
    }
}

nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& effective_config,
                                     const std::vector<std::string>& input_paths,
                                     const std::vector<std::string>& output_paths) {
    nlohmann::ordered_json manifest;
    manifest["schema_version"] = 1;
    manifest["command"] = command;
    manifest["config"] = effective_config;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& path : input_paths) {
        inputs.push_back({{"path", path}, {"digest", file_digest(path)}});
    }
    manifest["inputs"] = inputs;
    manifest["outputs"] = output_paths;
    return manifest;
}

void write_manifest(const std::string& path, const nlohmann::ordered_json& manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write manifest to " + path);
    }
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

}  // namespace charisma
