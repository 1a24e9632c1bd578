#include <doctest.h>

#include <atomic>
#include <fstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pakpa/error.hpp"
#include "pakpa/gateway.hpp"
#include "pakpa/jsonl.hpp"
#include "support/temp_dir.hpp"

using nlohmann::json;
using namespace pakpa;

namespace {

const std::filesystem::path kAssets{PAKPA_ASSET_DIR};
const std::filesystem::path kFixtures{PAKPA_FIXTURE_DIR};

ReviewComment sample_comment(const std::string& text = "The pool was heated.") {
    ReviewComment comment;
    comment.comment_id = "plaza/r1/0";
    comment.entity = {"plaza", Category::Hotels};
    comment.review_id = "r1";
    comment.text = text;
    return comment;
}

LlmConfig fast_config() {
    LlmConfig config;
    config.api_key_env_var.clear();
    config.retry_initial_delay = std::chrono::milliseconds(1);
    return config;
}

/// Scripted backend: plays back a fixed sequence of outcomes.
class ScriptedBackend : public ChatBackend {
  public:
    struct Step {
        bool ok = false;
        std::string text;     // reply when ok
        ErrorCode code = ErrorCode::NetworkError;
        int status = 0;       // for HttpError
    };

    explicit ScriptedBackend(std::vector<Step> steps) : steps_(std::move(steps)) {}

    std::string complete(const std::string&) override {
        const size_t at = next_.fetch_add(1);
        REQUIRE(at < steps_.size());
        const Step& step = steps_[at];
        if (step.ok) return step.text;
        throw Error(step.code, "scripted failure", step.status);
    }

    size_t calls() const { return next_.load(); }

  private:
    std::vector<Step> steps_;
    std::atomic<size_t> next_{0};
};

}  // namespace

TEST_CASE("shipped prompt templates load and validate") {
    const PromptTemplate absa = load_template(kAssets / "prompts" / "absa_fewshot.json");
    CHECK(absa.name == TemplateName::AbsaFewshot);
    CHECK(absa.parts.size() == 5);
    CHECK(absa.fewshot_examples.size() >= 10);

    const PromptTemplate kpg = load_template(kAssets / "prompts" / "kpg_oneshot.json");
    CHECK(kpg.name == TemplateName::KpgOneshot);
    CHECK(kpg.parts.size() == 6);
    CHECK(kpg.fewshot_examples.size() == 1);
}

TEST_CASE("absa prompt rendering fills examples and the comment") {
    const PromptTemplate tpl = load_template(kAssets / "prompts" / "absa_fewshot.json");
    const std::string prompt = render_absa_prompt(tpl, sample_comment("Lovely staff here."));
    CHECK(prompt.find("Lovely staff here.") != std::string::npos);
    CHECK(prompt.find("{{") == std::string::npos);  // every placeholder resolved
    // The live input is the final block.
    const auto tail = prompt.rfind("Comment: Lovely staff here.\nLabel:");
    CHECK(tail != std::string::npos);
    CHECK(tail + std::string("Comment: Lovely staff here.\nLabel:").size() == prompt.size());
    // Few-shot examples precede it.
    CHECK(prompt.find("Comment:") < tail);
}

TEST_CASE("kpg prompt rendering joins terms and numbers comments") {
    const PromptTemplate tpl = load_template(kAssets / "prompts" / "kpg_oneshot.json");
    AspectCluster cluster;
    cluster.terms = {{"staff", 4}, {"service", 2}};
    const std::string prompt =
        render_kpg_prompt(tpl, cluster, {"Great staff.", "Service was quick."});
    CHECK(prompt.find("Aspect terms: staff, service") != std::string::npos);
    CHECK(prompt.find("1. Great staff.") != std::string::npos);
    CHECK(prompt.find("2. Service was quick.") != std::string::npos);
    CHECK(prompt.find("{{") == std::string::npos);

    CHECK_THROWS_AS(render_kpg_prompt(tpl, AspectCluster{}, {}), Error);
}

TEST_CASE("sha256 matches the published test vector") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("request digests separate model from prompt") {
    const std::string a = request_digest("model-a", "prompt");
    CHECK(a == request_digest("model-a", "prompt"));
    CHECK(a != request_digest("model-b", "prompt"));
    CHECK(a != request_digest("model-a", "other"));
    CHECK(request_digest("ab", "c") != request_digest("a", "bc"));
}

TEST_CASE("chat request carries model, temperature, and the prompt") {
    LlmConfig config;
    config.model_name = "test-model";
    config.temperature = 0.25;
    config.max_tokens = 64;
    const json request = build_chat_request(config, "hello");
    CHECK(request.at("model") == "test-model");
    CHECK(request.at("temperature") == 0.25);
    CHECK(request.at("max_tokens") == 64);
    CHECK(request.at("messages").at(0).at("role") == "user");
    CHECK(request.at("messages").at(0).at("content") == "hello");
}

TEST_CASE("chat content extraction rejects malformed replies") {
    const json good = json::parse(
        R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})");
    CHECK(extract_chat_content(good) == "hi");
    CHECK_THROWS_AS(extract_chat_content(json::parse(R"({"choices":[]})")), Error);
    CHECK_THROWS_AS(extract_chat_content(json::parse(R"({"result":"hi"})")), Error);
}

TEST_CASE("response cache stores and survives corruption") {
    testsupport::TempDir dir("cache");
    ResponseCache cache(dir.path);
    const std::string digest = request_digest("m", "p");
    CHECK_FALSE(cache.lookup(digest).has_value());

    cache.store(digest, "m", "p", "reply");
    auto found = cache.lookup(digest);
    REQUIRE(found.has_value());
    CHECK(*found == "reply");

    // A torn write must read as a miss, then heal on the next store.
    std::filesystem::path entry_file;
    for (const auto& item : std::filesystem::directory_iterator(dir.path)) {
        entry_file = item.path();
    }
    std::ofstream(entry_file) << "{\"request_digest\": \"" << digest << "\", \"trunc";
    CHECK_FALSE(cache.lookup(digest).has_value());
    cache.store(digest, "m", "p", "reply");
    CHECK(cache.lookup(digest).has_value());
}

TEST_CASE("mock backend answers by digest or resolver") {
    MockBackend backend("test-model");
    backend.add_response("known prompt", "known reply");
    CHECK(backend.complete("known prompt") == "known reply");
    CHECK_THROWS_AS(backend.complete("unknown prompt"), Error);

    backend.set_resolver([](const std::string& prompt) -> std::optional<std::string> {
        if (prompt == "resolved") return "by resolver";
        return std::nullopt;
    });
    CHECK(backend.complete("resolved") == "by resolver");
    CHECK(backend.complete("known prompt") == "known reply");  // table first
    CHECK(backend.calls() == 4);
}

TEST_CASE("gateway serves repeats from the cache") {
    testsupport::TempDir dir("gateway");
    auto backend = std::make_shared<MockBackend>("vicuna-13b-v1.5");
    backend->add_response("p", "r");
    LlmGateway gateway(fast_config(), dir.path, backend);
    CHECK(gateway.complete("p") == "r");
    CHECK(gateway.complete("p") == "r");
    CHECK(gateway.stats().backend_calls == 1);
    CHECK(gateway.stats().cache_hits == 1);

    // A second gateway over the same directory starts warm.
    LlmGateway second(fast_config(), dir.path, std::make_shared<MockBackend>("vicuna-13b-v1.5"));
    CHECK(second.complete("p") == "r");
    CHECK(second.stats().backend_calls == 0);
}

TEST_CASE("gateway retries transport errors and retriable statuses") {
    testsupport::TempDir dir("gateway");
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Step>{
        {false, "", ErrorCode::NetworkError, 0},
        {false, "", ErrorCode::HttpError, 503},
        {true, "eventually", ErrorCode::NetworkError, 0},
    });
    LlmGateway gateway(fast_config(), dir.path, backend);
    CHECK(gateway.complete("p") == "eventually");
    CHECK(gateway.stats().retries == 2);
    CHECK(gateway.stats().backend_calls == 3);
}

TEST_CASE("gateway gives up after max_retries") {
    testsupport::TempDir dir("gateway");
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Step>{
        {false, "", ErrorCode::NetworkError, 0},
        {false, "", ErrorCode::NetworkError, 0},
        {false, "", ErrorCode::NetworkError, 0},
    });
    LlmGateway gateway(fast_config(), dir.path, backend);  // max_retries = 2
    try {
        gateway.complete("p");
        FAIL("expected NetworkError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NetworkError);
    }
    CHECK(backend->calls() == 3);
}

TEST_CASE("client errors are not retried") {
    testsupport::TempDir dir("gateway");
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptedBackend::Step>{
        {false, "", ErrorCode::HttpError, 400},
    });
    LlmGateway gateway(fast_config(), dir.path, backend);
    try {
        gateway.complete("p");
        FAIL("expected HttpError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HttpError);
        CHECK(e.http_status() == 400);
    }
    CHECK(backend->calls() == 1);
}

TEST_CASE("gateway caps concurrent backend calls") {
    testsupport::TempDir dir("gateway");

    class GaugeBackend : public ChatBackend {
      public:
        std::string complete(const std::string& prompt) override {
            const int now = in_flight_.fetch_add(1) + 1;
            int seen = peak_.load();
            while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            in_flight_.fetch_sub(1);
            return "reply to " + prompt;
        }
        int peak() const { return peak_.load(); }

      private:
        std::atomic<int> in_flight_{0};
        std::atomic<int> peak_{0};
    };

    auto backend = std::make_shared<GaugeBackend>();
    LlmGateway gateway(fast_config(), dir.path, backend, 2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) {
        threads.emplace_back(
            [&gateway, i] { gateway.complete("prompt " + std::to_string(i)); });
    }
    for (auto& thread : threads) thread.join();
    CHECK(backend->peak() <= 2);
    CHECK(gateway.stats().backend_calls == 6);
}

TEST_CASE("aspect replies parse across the labeled fixture") {
    for (const json& record : read_jsonl(kFixtures / "absa_replies_fixture.jsonl")) {
        const std::string raw = record.at("raw").get<std::string>();
        CAPTURE(raw);
        if (record.contains("error")) {
            try {
                parse_absa_response(raw);
                FAIL_CHECK("expected " << record.at("error").get<std::string>() << " for: " << raw);
            } catch (const Error& e) {
                CHECK(error_code_name(e.code()) == record.at("error").get<std::string>());
            }
            continue;
        }
        const auto pairs = parse_absa_response(raw);
        const json& expected = record.at("pairs");
        REQUIRE(pairs.size() == expected.size());
        for (size_t i = 0; i < pairs.size(); ++i) {
            CHECK(pairs[i].aspect == expected[i].at("aspect").get<std::string>());
            CHECK(to_string(pairs[i].sentiment) ==
                  expected[i].at("sentiment").get<std::string>());
        }
    }
}

TEST_CASE("key point replies parse across the labeled fixture") {
    for (const json& record : read_jsonl(kFixtures / "kpg_replies_fixture.jsonl")) {
        const std::string raw = record.at("raw").get<std::string>();
        CAPTURE(raw);
        if (record.contains("error")) {
            try {
                parse_kpg_response(raw);
                FAIL_CHECK("expected " << record.at("error").get<std::string>() << " for: " << raw);
            } catch (const Error& e) {
                CHECK(error_code_name(e.code()) == record.at("error").get<std::string>());
            }
            continue;
        }
        CHECK(parse_kpg_response(raw) == record.at("expected").get<std::string>());
    }
}
