#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "signet/error.hpp"

namespace signet::labeling {

/// A completion backend: one prompt in, raw completion text out.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual const std::string& name() const noexcept = 0;
};

inline std::string query_predictor(Predictor& backend, const std::string& prompt) { return backend.complete(prompt); }

/// Deterministic offline backend. Rules are tried in order: exact prompt
/// SHA-256, then substring rules (all needles must occur) in file order, then
/// the default completion. Without a default an unmatched prompt yields an
/// empty completion, which the response parser rejects.
class StubPredictor final : public Predictor {
public:
    struct Rule {
        std::optional<std::string> prompt_sha256;
        std::vector<std::string> contains;
        std::string completion;
    };

    StubPredictor(std::string name, std::vector<Rule> rules, std::optional<std::string> default_completion = {});
    StubPredictor(std::string name, std::function<std::string(const std::string&)> fn);

    /// Newline-delimited rule records:
    ///   {"model": "m1", "prompt_sha256": "...", "completion": "..."}
    ///   {"model": "m1", "contains": ["OUI: Ring"], "completion": "..."}
    ///   {"model": "m1", "default": "..."}
    /// Records without "model" apply to every model. Throws Error(ConfigError).
    static StubPredictor load(const std::filesystem::path& path, const std::string& model_name);
    /// Distinct model names mentioned in a rule file, sorted.
    static std::vector<std::string> models_in(const std::filesystem::path& path);

    std::string complete(const std::string& prompt) override;
    const std::string& name() const noexcept override { return name_; }

private:
    std::string name_;
    std::map<std::string, std::string> by_hash_;
    std::vector<Rule> substring_rules_;
    std::optional<std::string> default_;
    std::function<std::string(const std::string&)> fn_;
};

/// Thread-safe token bucket. A rate of zero disables limiting.
class TokenBucket {
public:
    TokenBucket(double tokens_per_second, double burst);
    /// Blocks until a token is available.
    void acquire();

private:
    double rate_;
    double burst_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    std::mutex mu_;
};

struct HttpPredictorConfig {
    std::string url;        // full endpoint, e.g. http://host:8080/v1/chat/completions
    std::string api_key;    // sent as a Bearer token when non-empty
    std::string model;
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds max_backoff{8000};
    std::chrono::seconds timeout{60};
    double requests_per_second = 0.0;
    double burst = 1.0;
    /// Replaced in tests to avoid real sleeps.
    std::function<void(std::chrono::milliseconds)> sleep;

    /// url and key from SIGNET_LLM_URL / SIGNET_LLM_KEY. Throws
    /// Error(ConfigError) when the URL is unset.
    static HttpPredictorConfig from_environment(std::string model);
};

/// Chat-completions style HTTP backend. Request body is
/// {"model", "messages": [{"role": "user", "content": prompt}]}; the completion
/// is read from choices[0].message.content, choices[0].text, "completion" or
/// "text". 5xx and transport failures retry with exponential backoff, 429
/// retries honoring Retry-After, 401/403 fail at once.
class HttpPredictor final : public Predictor {
public:
    explicit HttpPredictor(HttpPredictorConfig config);

    std::string complete(const std::string& prompt) override;
    const std::string& name() const noexcept override { return config_.model; }

private:
    HttpPredictorConfig config_;
    std::string origin_;
    std::string path_;
    TokenBucket bucket_;
};

/// Extracts the completion text from a response body; nullopt when none of
/// the known shapes match.
std::optional<std::string> completion_from_body(const std::string& body);

}  // namespace signet::labeling
