#include "charisma/model.hpp"

namespace charisma {

EncoderSpec encoder_preset(const std::string& name) {
    EncoderSpec spec;
    spec.name = name;
    if (name == "tiny-uncased") {
        spec.hidden_size = 16;
        spec.num_layers = 1;
        spec.num_heads = 2;
        spec.intermediate_size = 32;
        spec.max_position = 64;
    } else if (name == "mini-uncased") {
        spec.hidden_size = 64;
        spec.num_layers = 2;
        spec.num_heads = 2;
        spec.intermediate_size = 128;
        spec.max_position = 64;
    } else if (name == "base-uncased") {
        spec.hidden_size = 768;
        spec.num_layers = 12;
        spec.num_heads = 12;
        spec.intermediate_size = 3072;
        spec.max_position = 512;
    } else {
        throw ConfigError("unknown encoder preset: " + name +
                          " (known: tiny-uncased, mini-uncased, base-uncased)");
    }
    return spec;
}

void validate_encoder_spec(const EncoderSpec& spec) {
    if (spec.vocab_size < 1) {
        throw ConfigError("encoder vocab_size must be >= 1");
    }
    if (spec.hidden_size < 1 || spec.num_layers < 1 || spec.num_heads < 1 ||
        spec.intermediate_size < 1 || spec.max_position < 1 || spec.num_classes < 1) {
        throw ConfigError("encoder dimensions must all be >= 1");
    }
    if (spec.hidden_size % spec.num_heads != 0) {
        throw ConfigError("hidden_size " + std::to_string(spec.hidden_size) +
                          " is not divisible by num_heads " +
                          std::to_string(spec.num_heads));
    }
    if (spec.layer_norm_eps <= 0) {
        throw ConfigError("layer_norm_eps must be positive");
    }
}

}  // namespace charisma
