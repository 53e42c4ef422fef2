#pragma once

#include <memory>
#include <string>

namespace charisma {

struct RetryPolicy {
    int max_retries = 2;
    double backoff_base_seconds = 1.0;  // sleep base * 2^attempt between tries
};

// Provider-agnostic chat-completion client configuration. The API key is
// read from the environment variable named by `api_key_env`; an empty name
// means the endpoint needs no credentials (local or mock endpoints).
struct LLMClientConfig {
    std::string endpoint = "mock://numbered";
    std::string model_name = "mock-model";
    std::string api_key_env;
    int max_batch = 40;
    RetryPolicy retry;
    double rate_limit_rpm = 0.0;  // requests per minute; 0 disables pacing
    double temperature = 1.0;
};

/// Throws ArgumentError / ConfigError on invariant violations.
void validate_client_config(const LLMClientConfig& config);

struct CompletionResult {
    std::string content;
    int attempts = 1;  // 1 = no retry
};

// One chat completion per call. Implementations retry transient failures
// per the retry policy and throw GenerationError when retries are exhausted.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual CompletionResult complete(const std::string& prompt) = 0;
};

// Picks an implementation from the endpoint scheme:
//   http:// or https://  -> chat-completion HTTP client
//   mock://numbered      -> offline client emitting numbered placeholder
//                           sentences, for dry runs and tests
std::unique_ptr<LlmClient> make_llm_client(const LLMClientConfig& config);

}  // namespace charisma
