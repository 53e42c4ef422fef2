#include "charisma/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "charisma/errors.hpp"

namespace charisma {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string scheme;
    std::string host_port;  // "host:port" or "host"
    std::string path;       // leading slash, defaults to "/v1/chat/completions"
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl out;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL missing scheme: " + url);
    }
    out.scheme = url.substr(0, scheme_end);
    auto rest = url.substr(scheme_end + 3);
    auto slash = rest.find('/');
    if (slash == std::string::npos) {
        out.host_port = rest;
        out.path = "/v1/chat/completions";
    } else {
        out.host_port = rest.substr(0, slash);
        out.path = rest.substr(slash);
    }
    if (out.host_port.empty()) {
        throw ConfigError("endpoint URL missing host: " + url);
    }
    return out;
}

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(const LLMClientConfig& config)
        : config_(config), url_(parse_url(config.endpoint)) {
        if (!config_.api_key_env.empty()) {
            const char* key = std::getenv(config_.api_key_env.c_str());
            if (key == nullptr || *key == '\0') {
                throw ConfigError("API key environment variable " + config_.api_key_env +
                                  " is not set");
            }
            api_key_ = key;
        }
    }

    CompletionResult complete(const std::string& prompt) override {
        json request = {
            {"model", config_.model_name},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", config_.temperature},
        };
        const std::string body = request.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
            if (attempt > 0) {
                double seconds =
                    config_.retry.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
                if (seconds > 0) {
                    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
                }
            }
            pace();
            auto response = post(body);
            if (!response) {
                last_error = "transport failure";
                continue;
            }
            if (response->status == 429 || response->status >= 500) {
                last_error = "HTTP " + std::to_string(response->status);
                continue;
            }
            if (response->status != 200) {
                throw GenerationError("LLM endpoint returned HTTP " +
                                      std::to_string(response->status));
            }
            return {extract_content(response->body), attempt + 1};
        }
        throw GenerationError("LLM request failed after " +
                              std::to_string(config_.retry.max_retries + 1) +
                              " attempts: " + last_error);
    }

private:
    httplib::Result post(const std::string& body) {
        httplib::Headers headers;
        if (!api_key_.empty()) {
            headers.emplace("Authorization", "Bearer " + api_key_);
        }
        if (url_.scheme == "https") {
            httplib::SSLClient client(url_.host_port);
            client.set_read_timeout(120, 0);
            return client.Post(url_.path, headers, body, "application/json");
        }
        httplib::Client client(url_.scheme + "://" + url_.host_port);
        client.set_read_timeout(120, 0);
        return client.Post(url_.path, headers, body, "application/json");
    }

    static std::string extract_content(const std::string& body) {
        json response;
        try {
            response = json::parse(body);
        } catch (const json::parse_error& e) {
            throw GenerationError(std::string("malformed completion response: ") + e.what());
        }
        if (!response.contains("choices") || !response["choices"].is_array() ||
            response["choices"].empty()) {
            throw GenerationError("completion response has no choices");
        }
        const auto& message = response["choices"][0]["message"];
        if (!message.contains("content") || !message["content"].is_string()) {
            throw GenerationError("completion response has no message content");
        }
        return message["content"].get<std::string>();
    }

    // Enforces the configured requests/minute by spacing request starts.
    void pace() {
        if (config_.rate_limit_rpm <= 0) {
            return;
        }
        const auto interval = std::chrono::duration<double>(60.0 / config_.rate_limit_rpm);
        std::unique_lock lock(pace_mutex_);
        auto now = std::chrono::steady_clock::now();
        if (has_last_request_ && now - last_request_ < interval) {
            auto wait = interval - (now - last_request_);
            lock.unlock();
            std::this_thread::sleep_for(wait);
            lock.lock();
            now = std::chrono::steady_clock::now();
        }
        last_request_ = now;
        has_last_request_ = true;
    }

    LLMClientConfig config_;
    ParsedUrl url_;
    std::string api_key_;
    std::mutex pace_mutex_;
    std::chrono::steady_clock::time_point last_request_;
    bool has_last_request_ = false;
};

// Offline stand-in: answers every prompt with numbered placeholder
// sentences. The requested count is read from the first integer in the
// prompt, which the shipped templates always start with.
class MockNumberedClient : public LlmClient {
public:
    CompletionResult complete(const std::string& prompt) override {
        int count = first_integer(prompt);
        std::string content;
        for (int i = 0; i < count; ++i) {
            ++serial_;
            content += std::to_string(i + 1) + ". \"Placeholder sentence number " +
                       std::to_string(serial_) + " produced by the offline mock endpoint.\"\n";
        }
        return {content, 1};
    }

private:
    static int first_integer(const std::string& text) {
        std::size_t i = 0;
        while (i < text.size() && (text[i] < '0' || text[i] > '9')) {
            ++i;
        }
        int value = 0;
        bool any = false;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            value = value * 10 + (text[i] - '0');
            any = true;
            ++i;
        }
        return any && value > 0 ? value : 1;
    }

    long serial_ = 0;
};

}  // namespace

void validate_client_config(const LLMClientConfig& config) {
    if (config.max_batch < 1) {
        throw ArgumentError("max_batch must be >= 1");
    }
    if (config.retry.max_retries < 0) {
        throw ArgumentError("max_retries must be >= 0");
    }
    if (config.temperature < 0) {
        throw ArgumentError("temperature must be >= 0");
    }
    if (config.rate_limit_rpm < 0) {
        throw ArgumentError("rate_limit_rpm must be >= 0");
    }
    if (config.endpoint.empty()) {
        throw ConfigError("endpoint must not be empty");
    }
}

std::unique_ptr<LlmClient> make_llm_client(const LLMClientConfig& config) {
    validate_client_config(config);
    if (config.endpoint.rfind("mock://", 0) == 0) {
        return std::make_unique<MockNumberedClient>();
    }
    if (config.endpoint.rfind("http://", 0) == 0 ||
        config.endpoint.rfind("https://", 0) == 0) {
        return std::make_unique<HttpLlmClient>(config);
    }
    throw ConfigError("unsupported endpoint scheme: " + config.endpoint);
}

}  // namespace charisma
