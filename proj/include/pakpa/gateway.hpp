#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pakpa/core.hpp"
#include "pakpa/error.hpp"

namespace pakpa {

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

enum class TemplateName { AbsaFewshot, KpgOneshot };

std::string to_string(TemplateName name);
TemplateName template_name_from_string(const std::string& text);

struct PromptPart {
    std::string label;
    std::string text;
};

struct FewshotExample {
    std::string input;
    std::string output;
};

/// A prompt template loaded from a JSON asset. Parts are joined with a blank
/// line after placeholder substitution; the examples block is expanded from
/// `fewshot_examples` via `example_format` joined by `example_separator`.
struct PromptTemplate {
    TemplateName name = TemplateName::AbsaFewshot;
    std::vector<PromptPart> parts;
    std::string example_format;
    std::string example_separator;
    std::vector<FewshotExample> fewshot_examples;
};

/// Loads and validates a template. The aspect-extraction template must have
/// exactly 5 parts and the key-point template exactly 6; anything else throws
/// TemplateMismatch.
PromptTemplate load_template(const std::filesystem::path& path);

/// Renders the aspect-sentiment prompt for one comment.
std::string render_absa_prompt(const PromptTemplate& tpl, const ReviewComment& comment);

/// Renders the key-point prompt for one cluster. `member_texts` carries the
/// texts of the cluster's member comments in a caller-chosen (stable) order.
/// Throws EmptyCluster when the cluster has no terms or no member texts.
std::string render_kpg_prompt(const PromptTemplate& tpl, const AspectCluster& cluster,
                              const std::vector<std::string>& member_texts);

// ---------------------------------------------------------------------------
// Request digests and the response cache
// ---------------------------------------------------------------------------

/// Hex-encoded SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

/// Digest identifying one completion request. Depends only on the model name
/// and the rendered prompt, so reruns hit the cache.
std::string request_digest(const std::string& model_name, const std::string& prompt);

struct CacheEntry {
    std::string request_digest;
    std::string response_text;
    std::string timestamp;
};

/// One JSON file per response, named by the request digest. Reads are
/// lock-free; writes are serialized and atomic (tmp + rename).
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> lookup(const std::string& digest) const;
    void store(const std::string& digest, const std::string& model, const std::string& prompt,
               const std::string& response);

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;
};

// ---------------------------------------------------------------------------
// Chat backends
// ---------------------------------------------------------------------------

struct LlmConfig {
    std::string endpoint_url = "http://localhost:8000/v1";
    std::string model_name = "vicuna-13b-v1.5";
    double temperature = 0.0;
    int max_tokens = 512;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
    std::chrono::milliseconds retry_initial_delay{250};
    std::string api_key_env_var = "LLM_API_KEY";

    /// Throws ConfigError on out-of-range values.
    void check() const;
};

/// Builds the JSON body of a chat-completion request for `prompt`.
nlohmann::json build_chat_request(const LlmConfig& config, const std::string& prompt);

/// Pulls the assistant text out of a chat-completion response body.
/// Throws MalformedJson when the expected fields are missing.
std::string extract_chat_content(const nlohmann::json& response);

/// A single-attempt completion transport. Retries live in the gateway.
class ChatBackend {
  public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// HTTP backend speaking the OpenAI-compatible chat-completions protocol.
/// Throws NetworkError on transport failures, HttpError on non-2xx statuses
/// (with the status in Error::http_status) and AuthMissing when
/// `api_key_env_var` is set but absent from the environment.
std::shared_ptr<ChatBackend> make_http_backend(const LlmConfig& config);

/// In-memory backend for tests and offline runs. Responses are looked up by
/// request digest; unmatched prompts fall through to the resolver hook, and
/// prompts neither table nor resolver can answer throw NetworkError.
class MockBackend : public ChatBackend {
  public:
    using Resolver = std::function<std::optional<std::string>(const std::string& prompt)>;

    explicit MockBackend(std::string model_name);

    /// Registers a canned response under request_digest(model, prompt).
    void add_response(const std::string& prompt, const std::string& response);
    void set_resolver(Resolver resolver);

    std::string complete(const std::string& prompt) override;

    int calls() const;

  private:
    std::string model_name_;
    std::map<std::string, std::string> by_digest_;
    Resolver resolver_;
    mutable std::mutex mutex_;
    int calls_ = 0;
};

// ---------------------------------------------------------------------------
// The gateway
// ---------------------------------------------------------------------------

struct GatewayStats {
    int cache_hits = 0;
    int backend_calls = 0;
    int retries = 0;
};

/// Cache-first completion front end. At most `in_flight_limit` backend calls
/// run concurrently; transport errors and retriable statuses (5xx, 429) are
/// retried with exponential backoff up to `max_retries` times and surface as
/// NetworkError once exhausted. Other HTTP errors propagate immediately.
class LlmGateway {
  public:
    LlmGateway(LlmConfig config, std::filesystem::path cache_dir,
               std::shared_ptr<ChatBackend> backend, int in_flight_limit = 4);
    ~LlmGateway();

    /// Thread-safe. Returns the completion text for `prompt`.
    std::string complete(const std::string& prompt);

    GatewayStats stats() const;
    const LlmConfig& config() const { return config_; }

  private:
    class Semaphore;

    LlmConfig config_;
    ResponseCache cache_;
    std::shared_ptr<ChatBackend> backend_;
    std::unique_ptr<Semaphore> slots_;
    mutable std::mutex stats_mutex_;
    GatewayStats stats_;
};

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

/// Extracts (aspect, sentiment) pairs from a raw aspect-analysis reply. The
/// reply may wrap the JSON in prose or code fences; the first balanced JSON
/// region that parses decides the outcome. Throws MalformedJson when no
/// region parses (or the parsed shape is wrong) and UnknownPolarity when a
/// sentiment string is not positive/neutral/negative.
std::vector<AspectPair> parse_absa_response(const std::string& raw);

/// Distills a raw key-point reply down to one clean sentence: strips code
/// fences, "Key point:"-style labels, list bullets, emphasis markers and
/// wrapping quotes, keeps the first sentence, and guarantees terminal
/// punctuation. Throws EmptyGeneration when nothing usable remains.
std::string parse_kpg_response(const std::string& raw);

}  // namespace pakpa
