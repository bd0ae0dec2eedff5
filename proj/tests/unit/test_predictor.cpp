#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "signet/error.hpp"
#include "signet/labeling/alias.hpp"
#include "signet/labeling/predictor.hpp"
#include "signet/text.hpp"
#include "support.hpp"

using namespace signet;
using namespace signet::labeling;
using namespace std::chrono_literals;

namespace {

// Local mock backend; handlers are installed per test.
class MockServer {
public:
    MockServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    httplib::Server& server() { return server_; }
    std::string url(const std::string& path = "/v1/chat/completions") const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string chat_body(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

HttpPredictorConfig config_for(const MockServer& mock, std::vector<std::chrono::milliseconds>* sleeps = nullptr) {
    HttpPredictorConfig c;
    c.url = mock.url();
    c.model = "mock-model";
    c.api_key = "secret";
    c.max_attempts = 3;
    c.initial_backoff = 10ms;
    c.timeout = 5s;
    c.sleep = [sleeps](std::chrono::milliseconds d) {
        if (sleeps) sleeps->push_back(d);
    };
    return c;
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("stub predictor") {
    const std::string prompt = "Below is information about a device.\nOUI: Wyze Labs Inc.\n";
    StubPredictor by_hash("s", {StubPredictor::Rule{text::sha256_hex(prompt), {}, "Vendor: Wyze"}});
    CHECK(query_predictor(by_hash, prompt) == "Vendor: Wyze");
    CHECK(by_hash.complete("something else").empty());

    StubPredictor with_default("s", {StubPredictor::Rule{std::nullopt, {"OUI: Roku", "Ads"}, "Vendor: Roku"}}, "Vendor: ?");
    CHECK(with_default.complete("OUI: Roku, Inc.\nTalks to Ads: True") == "Vendor: Roku");
    CHECK(with_default.complete("OUI: Roku, Inc.") == "Vendor: ?");
    CHECK(with_default.name() == "s");

    const auto path = support::kFixtureDir / "e2e" / "stub_completions.jsonl";
    CHECK(StubPredictor::models_in(path) == std::vector<std::string>{"gemini-1.5-pro", "gpt-4o", "llama-3.1-70b"});
    auto gpt = StubPredictor::load(path, "gpt-4o");
    CHECK(gpt.complete("OUI: Amazon Technologies Inc.").find("Vendor: Ring") != std::string::npos);
}

TEST_CASE("completion body shapes") {
    CHECK(completion_from_body(chat_body("hi")) == "hi");
    CHECK(completion_from_body(R"({"choices":[{"text":"legacy"}]})") == "legacy");
    CHECK(completion_from_body(R"({"completion":"c"})") == "c");
    CHECK_FALSE(completion_from_body(R"({"nothing":1})"));
    CHECK_FALSE(completion_from_body("not json"));
}

TEST_CASE("http predictor success and wire format") {
    MockServer mock;
    nlohmann::json seen;
    std::string auth;
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(chat_body("Explanation: e\nVendor: Wyze"), "application/json");
    });
    HttpPredictor p(config_for(mock));
    CHECK(p.complete("the prompt") == "Explanation: e\nVendor: Wyze");
    CHECK(seen["model"] == "mock-model");
    CHECK(seen["messages"][0]["role"] == "user");
    CHECK(seen["messages"][0]["content"] == "the prompt");
    CHECK(auth == "Bearer secret");
    CHECK(p.name() == "mock-model");
}

TEST_CASE("http predictor auth failure is not retried") {
    MockServer mock;
    std::atomic<int> calls{0};
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 401;
    });
    HttpPredictor p(config_for(mock));
    CHECK(code_of([&] { p.complete("x"); }) == Errc::AuthError);
    CHECK(calls == 1);
}

TEST_CASE("http predictor retries 5xx then succeeds") {
    MockServer mock;
    std::atomic<int> calls{0};
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content(chat_body("ok"), "application/json");
    });
    std::vector<std::chrono::milliseconds> sleeps;
    HttpPredictor p(config_for(mock, &sleeps));
    CHECK(p.complete("x") == "ok");
    CHECK(calls == 3);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{10ms, 20ms});
}

TEST_CASE("http predictor exhausts retries on 5xx") {
    MockServer mock;
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    HttpPredictor p(config_for(mock));
    CHECK(code_of([&] { p.complete("x"); }) == Errc::TransportError);
}

TEST_CASE("http predictor honors Retry-After and reports rate limiting") {
    MockServer mock;
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "2");
    });
    std::vector<std::chrono::milliseconds> sleeps;
    HttpPredictor p(config_for(mock, &sleeps));
    try {
        p.complete("x");
        FAIL("expected RateLimitedError");
    } catch (const RateLimitedError& e) {
        CHECK(e.code() == Errc::RateLimited);
        CHECK(e.retry_after() == 2000ms);
    }
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{2000ms, 2000ms});
}

TEST_CASE("http predictor client errors and missing server") {
    MockServer mock;
    std::atomic<int> calls{0};
    mock.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 400;
    });
    HttpPredictor p(config_for(mock));
    CHECK(code_of([&] { p.complete("x"); }) == Errc::TransportError);
    CHECK(calls == 1);

    auto cfg = config_for(mock);
    cfg.url = "http://127.0.0.1:9/v1/chat/completions";
    cfg.max_attempts = 2;
    HttpPredictor dead(cfg);
    CHECK(code_of([&] { dead.complete("x"); }) == Errc::TransportError);
}

TEST_CASE("environment configuration") {
    ::unsetenv("SIGNET_LLM_URL");
    CHECK(code_of([] { HttpPredictorConfig::from_environment("m"); }) == Errc::ConfigError);
    ::setenv("SIGNET_LLM_URL", "http://localhost:1/v1", 1);
    ::setenv("SIGNET_LLM_KEY", "k", 1);
    const auto c = HttpPredictorConfig::from_environment("m");
    CHECK(c.url == "http://localhost:1/v1");
    CHECK(c.api_key == "k");
    CHECK(c.model == "m");
    ::unsetenv("SIGNET_LLM_URL");
    ::unsetenv("SIGNET_LLM_KEY");
}

TEST_CASE("token bucket spaces requests") {
    TokenBucket unlimited(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) unlimited.acquire();

    TokenBucket bucket(50.0, 1.0);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 6; ++i) bucket.acquire();
    CHECK(std::chrono::steady_clock::now() - start >= 90ms);
}

TEST_CASE("live alias resolver is cache-through") {
    MockServer mock;
    std::atomic<int> calls{0};
    std::string last_query;
    mock.server().Get("/sparql", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        last_query = req.get_param_value("query");
        const bool known = last_query.find("\"Nest\"") != std::string::npos;
        nlohmann::json bindings = nlohmann::json::array();
        if (known) bindings.push_back({{"parentLabel", {{"type", "literal"}, {"value", "Google"}}}});
        res.set_content(nlohmann::json{{"results", {{"bindings", bindings}}}}.dump(), "application/sparql-results+json");
    });

    const auto cache = std::filesystem::temp_directory_path() / "signet_alias_cache_test.tsv";
    std::filesystem::remove(cache);
    {
        LiveAliasResolver r(mock.url("/sparql"), cache);
        CHECK(r.resolve("Nest") == "Google");
        CHECK(last_query.find("P749") != std::string::npos);
        CHECK(r.resolve("nest") == "Google");
        CHECK(r.resolve("Acme IoT") == "Acme IoT");
        CHECK(r.resolve("Acme IoT") == "Acme IoT");
        CHECK(calls == 2);
        CHECK(r.store().source() == VendorAliasStore::Source::live_endpoint_cache);
    }
    {
        LiveAliasResolver offline("http://127.0.0.1:9/sparql", cache, 2s);
        CHECK(offline.resolve("Nest") == "Google");
        CHECK(offline.failures().empty());
        CHECK(offline.resolve("Blink") == "Blink");
        CHECK(offline.failures().count("Blink"));
    }
    CHECK(VendorAliasStore::load(cache).resolve("Nest") == "Google");
    std::filesystem::remove(cache);
}
