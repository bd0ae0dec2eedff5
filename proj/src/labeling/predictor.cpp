#include "signet/labeling/predictor.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "signet/records.hpp"
#include "signet/text.hpp"

namespace signet::labeling {

StubPredictor::StubPredictor(std::string name, std::vector<Rule> rules, std::optional<std::string> default_completion)
    : name_(std::move(name)), default_(std::move(default_completion)) {
    for (auto& r : rules) {
        if (r.prompt_sha256) {
            by_hash_.emplace(text::to_lower_ascii(*r.prompt_sha256), r.completion);
        } else if (!r.contains.empty()) {
            substring_rules_.push_back(std::move(r));
        }
    }
}

StubPredictor::StubPredictor(std::string name, std::function<std::string(const std::string&)> fn)
    : name_(std::move(name)), fn_(std::move(fn)) {}

StubPredictor StubPredictor::load(const std::filesystem::path& path, const std::string& model_name) {
    std::vector<Rule> rules;
    std::optional<std::string> def;
    auto records = records::read_jsonl(path, [&](std::size_t line, const std::string& msg) {
        throw Error(Errc::ConfigError, path.string() + ":" + std::to_string(line) + ": " + msg);
    });
    for (const auto& r : records) {
        if (!r.is_object()) throw Error(Errc::ConfigError, path.string() + ": stub rule is not an object");
        if (auto m = r.find("model"); m != r.end() && m->get<std::string>() != model_name) continue;
        if (auto d = r.find("default"); d != r.end()) {
            def = d->get<std::string>();
            continue;
        }
        Rule rule;
        rule.completion = r.value("completion", std::string());
        if (auto h = r.find("prompt_sha256"); h != r.end()) rule.prompt_sha256 = h->get<std::string>();
        if (auto c = r.find("contains"); c != r.end()) {
            if (c->is_string()) rule.contains.push_back(c->get<std::string>());
            else for (const auto& n : *c) rule.contains.push_back(n.get<std::string>());
        }
        if (!rule.prompt_sha256 && rule.contains.empty()) {
            throw Error(Errc::ConfigError, path.string() + ": stub rule needs prompt_sha256, contains or default");
        }
        rules.push_back(std::move(rule));
    }
    return StubPredictor(model_name, std::move(rules), std::move(def));
}

std::vector<std::string> StubPredictor::models_in(const std::filesystem::path& path) {
    std::set<std::string> names;
    for (const auto& r : records::read_jsonl(path)) {
        if (auto m = r.find("model"); m != r.end()) names.insert(m->get<std::string>());
    }
    return {names.begin(), names.end()};
}

std::string StubPredictor::complete(const std::string& prompt) {
    if (fn_) return fn_(prompt);
    if (!by_hash_.empty()) {
        if (auto it = by_hash_.find(text::sha256_hex(prompt)); it != by_hash_.end()) return it->second;
    }
    for (const auto& rule : substring_rules_) {
        bool all = std::all_of(rule.contains.begin(), rule.contains.end(),
                               [&](const std::string& n) { return prompt.find(n) != std::string::npos; });
        if (all) return rule.completion;
    }
    return default_.value_or(std::string());
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0.0) return;
    std::unique_lock lock(mu_);
    while (true) {
        auto now = std::chrono::steady_clock::now();
        tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        lock.unlock();
        std::this_thread::sleep_for(wait);
        lock.lock();
    }
}

HttpPredictorConfig HttpPredictorConfig::from_environment(std::string model) {
    HttpPredictorConfig c;
    const char* url = std::getenv("SIGNET_LLM_URL");
    if (!url || !*url) throw Error(Errc::ConfigError, "SIGNET_LLM_URL is not set (use --stub for offline runs)");
    c.url = url;
    if (const char* key = std::getenv("SIGNET_LLM_KEY")) c.api_key = key;
    c.model = std::move(model);
    return c;
}

std::optional<std::string> completion_from_body(const std::string& body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (auto ch = j.find("choices"); ch != j.end() && ch->is_array() && !ch->empty()) {
        const auto& first = ch->front();
        if (auto m = first.find("message"); m != first.end() && m->is_object()) {
            if (auto c = m->find("content"); c != m->end() && c->is_string()) return c->get<std::string>();
        }
        if (auto t = first.find("text"); t != first.end() && t->is_string()) return t->get<std::string>();
    }
    for (const char* key : {"completion", "text", "content"}) {
        if (auto it = j.find(key); it != j.end() && it->is_string()) return it->get<std::string>();
    }
    return std::nullopt;
}

namespace {

void split_url(const std::string& url, std::string& origin, std::string& path) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(Errc::ConfigError, "predictor URL lacks a scheme: " + url);
    auto slash = url.find('/', scheme + 3);
    origin = url.substr(0, slash);
    path = slash == std::string::npos ? "/" : url.substr(slash);
}

std::chrono::milliseconds parse_retry_after(const std::string& value, std::chrono::milliseconds fallback) {
    auto t = text::trim(value);
    if (t.empty()) return fallback;
    char* end = nullptr;
    std::string s(t);
    double secs = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || secs < 0) return fallback;
    return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
}

}  // namespace

HttpPredictor::HttpPredictor(HttpPredictorConfig config)
    : config_(std::move(config)), bucket_(config_.requests_per_second, config_.burst) {
    split_url(config_.url, origin_, path_);
    if (config_.max_attempts < 1) config_.max_attempts = 1;
    if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpPredictor::complete(const std::string& prompt) {
    const nlohmann::json request{{"model", config_.model},
                                 {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
    const auto body = request.dump();

    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto backoff = config_.initial_backoff;
    std::string last_error = "no attempt made";
    std::chrono::milliseconds last_retry_after{0};
    bool rate_limited = false;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        bucket_.acquire();
        auto res = client.Post(path_, headers, body, "application/json");
        std::chrono::milliseconds wait = backoff;
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            rate_limited = false;
        } else if (res->status == 200) {
            if (auto text = completion_from_body(res->body)) return *text;
            throw Error(Errc::TransportError, "response body has no completion text");
        } else if (res->status == 401 || res->status == 403) {
            throw Error(Errc::AuthError, "backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
        } else if (res->status == 429) {
            last_retry_after = parse_retry_after(res->get_header_value("Retry-After"), backoff);
            wait = last_retry_after;
            rate_limited = true;
            last_error = "rate limited (HTTP 429)";
        } else if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            rate_limited = false;
        } else {
            throw Error(Errc::TransportError, "HTTP " + std::to_string(res->status) + " from " + config_.url);
        }
        if (attempt < config_.max_attempts) {
            config_.sleep(std::min(wait, config_.max_backoff));
            backoff = std::min(backoff * 2, config_.max_backoff);
        }
    }
    if (rate_limited) {
        throw RateLimitedError("still rate limited after " + std::to_string(config_.max_attempts) + " attempts",
                               last_retry_after);
    }
    throw Error(Errc::TransportError, last_error + " after " + std::to_string(config_.max_attempts) + " attempts");
}

}  // namespace signet::labeling
