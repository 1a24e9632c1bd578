#include "pakpa/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pakpa/ingestion.hpp"
#include "pakpa/jsonl.hpp"

using nlohmann::json;

namespace pakpa {

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::string need_string(const json& doc, const char* key, const std::string& where) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw Error(ErrorCode::MissingField, std::string("'") + key + "' in " + where);
    }
    return doc[key].get<std::string>();
}

std::string expand_examples(const PromptTemplate& tpl) {
    std::string out;
    for (std::size_t i = 0; i < tpl.fewshot_examples.size(); ++i) {
        if (i > 0) out += tpl.example_separator;
        std::string fragment = replace_all(tpl.example_format, "{{input}}", tpl.fewshot_examples[i].input);
        fragment = replace_all(fragment, "{{output}}", tpl.fewshot_examples[i].output);
        out += fragment;
    }
    return out;
}

std::string render_parts(const PromptTemplate& tpl,
                         const std::map<std::string, std::string>& values) {
    const std::string examples = expand_examples(tpl);
    std::string prompt;
    for (std::size_t i = 0; i < tpl.parts.size(); ++i) {
        if (i > 0) prompt += "\n\n";
        std::string text = replace_all(tpl.parts[i].text, "{{examples}}", examples);
        for (const auto& [key, value] : values) {
            text = replace_all(text, "{{" + key + "}}", value);
        }
        prompt += text;
    }
    return prompt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

std::string to_string(TemplateName name) {
    switch (name) {
        case TemplateName::AbsaFewshot: return "absa_fewshot";
        case TemplateName::KpgOneshot: return "kpg_oneshot";
    }
    throw Error(ErrorCode::TemplateMismatch, "unhandled template name");
}

TemplateName template_name_from_string(const std::string& text) {
    if (text == "absa_fewshot") return TemplateName::AbsaFewshot;
    if (text == "kpg_oneshot") return TemplateName::KpgOneshot;
    throw Error(ErrorCode::TemplateMismatch, "unknown template name '" + text + "'");
}

PromptTemplate load_template(const std::filesystem::path& path) {
    const json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded()) {
        throw Error(ErrorCode::ParseError, "template file " + path.string() + " is not valid JSON");
    }
    const std::string where = path.filename().string();

    PromptTemplate tpl;
    tpl.name = template_name_from_string(need_string(doc, "name", where));
    if (!doc.contains("parts") || !doc["parts"].is_array()) {
        throw Error(ErrorCode::MissingField, "'parts' in " + where);
    }
    for (const json& part : doc["parts"]) {
        tpl.parts.push_back({need_string(part, "label", where), need_string(part, "text", where)});
    }
    tpl.example_format = need_string(doc, "example_format", where);
    tpl.example_separator = need_string(doc, "example_separator", where);
    if (!doc.contains("fewshot_examples") || !doc["fewshot_examples"].is_array()) {
        throw Error(ErrorCode::MissingField, "'fewshot_examples' in " + where);
    }
    for (const json& example : doc["fewshot_examples"]) {
        tpl.fewshot_examples.push_back(
            {need_string(example, "input", where), need_string(example, "output", where)});
    }

    const std::size_t expected = tpl.name == TemplateName::AbsaFewshot ? 5u : 6u;
    if (tpl.parts.size() != expected) {
        throw Error(ErrorCode::TemplateMismatch,
                    to_string(tpl.name) + " must have exactly " + std::to_string(expected) +
                        " parts, found " + std::to_string(tpl.parts.size()));
    }
    if (tpl.fewshot_examples.empty()) {
        throw Error(ErrorCode::TemplateMismatch, to_string(tpl.name) + " has no examples");
    }
    return tpl;
}

std::string render_absa_prompt(const PromptTemplate& tpl, const ReviewComment& comment) {
    if (tpl.name != TemplateName::AbsaFewshot) {
        throw Error(ErrorCode::TemplateMismatch,
                    "aspect analysis needs absa_fewshot, got " + to_string(tpl.name));
    }
    return render_parts(tpl, {{"comment", comment.text}});
}

std::string render_kpg_prompt(const PromptTemplate& tpl, const AspectCluster& cluster,
                              const std::vector<std::string>& member_texts) {
    if (tpl.name != TemplateName::KpgOneshot) {
        throw Error(ErrorCode::TemplateMismatch,
                    "key point generation needs kpg_oneshot, got " + to_string(tpl.name));
    }
    if (cluster.terms.empty() || member_texts.empty()) {
        throw Error(ErrorCode::EmptyCluster,
                    "cluster " + std::to_string(cluster.cluster_id) + " has no content to summarize");
    }
    std::string aspect_terms;
    for (std::size_t i = 0; i < cluster.terms.size(); ++i) {
        if (i > 0) aspect_terms += ", ";
        aspect_terms += cluster.terms[i].term;
    }
    std::string comments;
    for (std::size_t i = 0; i < member_texts.size(); ++i) {
        if (i > 0) comments += '\n';
        comments += std::to_string(i + 1) + ". " + member_texts[i];
    }
    return render_parts(tpl, {{"aspect_terms", aspect_terms}, {"comments", comments}});
}

// ---------------------------------------------------------------------------
// Digests and the response cache
// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(ErrorCode::IoError, "sha256 digest computation failed");
    }
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(static_cast<std::size_t>(length) * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string request_digest(const std::string& model_name, const std::string& prompt) {
    std::string payload;
    payload.reserve(model_name.size() + prompt.size() + 1);
    payload += model_name;
    payload += '\0';
    payload += prompt;
    return sha256_hex(payload);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::lookup(const std::string& digest) const {
    const auto path = dir_ / (digest + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    // A torn or corrupt entry counts as a miss; the next store overwrites it.
    const json entry = json::parse(buffer.str(), nullptr, false);
    if (entry.is_discarded() || !entry.is_object()) return std::nullopt;
    if (!entry.contains("response_text") || !entry["response_text"].is_string()) return std::nullopt;
    if (entry.contains("request_digest") && entry["request_digest"] != digest) return std::nullopt;
    return entry["response_text"].get<std::string>();
}

void ResponseCache::store(const std::string& digest, const std::string& model,
                          const std::string& prompt, const std::string& response) {
    json entry;
    entry["request_digest"] = digest;
    entry["model"] = model;
    entry["prompt"] = prompt;
    entry["response_text"] = response;
    entry["timestamp"] = iso_utc_now();
    std::lock_guard<std::mutex> lock(write_mutex_);
    write_text_atomic(dir_ / (digest + ".json"), entry.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

void LlmConfig::check() const {
    if (temperature < 0.0 || temperature > 2.0) {
        throw Error(ErrorCode::ConfigError,
                    "temperature must be in [0, 2], got " + std::to_string(temperature));
    }
    if (max_tokens < 0) throw Error(ErrorCode::ConfigError, "max_tokens must be >= 0");
    if (max_retries < 0) throw Error(ErrorCode::ConfigError, "max_retries must be >= 0");
    if (timeout.count() <= 0) throw Error(ErrorCode::ConfigError, "timeout must be positive");
    if (retry_initial_delay.count() < 0) {
        throw Error(ErrorCode::ConfigError, "retry_initial_delay must be >= 0");
    }
    if (model_name.empty()) throw Error(ErrorCode::ConfigError, "model_name must not be empty");
}

json build_chat_request(const LlmConfig& config, const std::string& prompt) {
    json body;
    body["model"] = config.model_name;
    body["temperature"] = config.temperature;
    if (config.max_tokens > 0) body["max_tokens"] = config.max_tokens;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    return body;
}

std::string extract_chat_content(const json& response) {
    if (!response.is_object() || !response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty()) {
        throw Error(ErrorCode::MalformedJson, "chat response has no choices");
    }
    const json& first = response["choices"][0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw Error(ErrorCode::MalformedJson, "chat response choice has no message content");
    }
    return first["message"]["content"].get<std::string>();
}

namespace {

struct ParsedEndpoint {
    std::string base;         // scheme://host[:port]
    std::string path_prefix;  // e.g. "/v1", no trailing slash
};

ParsedEndpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::ConfigError,
                    "endpoint_url must start with http:// or https://, got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

class HttpBackend : public ChatBackend {
  public:
    explicit HttpBackend(LlmConfig config)
        : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint_url)) {}

    std::string complete(const std::string& prompt) override {
        std::string api_key;
        if (!config_.api_key_env_var.empty()) {
            const char* value = std::getenv(config_.api_key_env_var.c_str());
            if (value == nullptr || *value == '\0') {
                throw Error(ErrorCode::AuthMissing, "environment variable " +
                                                        config_.api_key_env_var + " is not set");
            }
            api_key = value;
        }

        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);

        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

        const auto result = client.Post(endpoint_.path_prefix + "/chat/completions", headers,
                                        build_chat_request(config_, prompt).dump(),
                                        "application/json");
        if (!result) {
            throw Error(ErrorCode::NetworkError, "transport failure talking to " + endpoint_.base +
                                                     ": " + httplib::to_string(result.error()));
        }
        if (result->status < 200 || result->status >= 300) {
            throw Error(ErrorCode::HttpError,
                        "status " + std::to_string(result->status) + " from " + endpoint_.base,
                        result->status);
        }
        const json parsed = json::parse(result->body, nullptr, false);
        if (parsed.is_discarded()) {
            throw Error(ErrorCode::MalformedJson, "response body is not valid JSON");
        }
        return extract_chat_content(parsed);
    }

  private:
    LlmConfig config_;
    ParsedEndpoint endpoint_;
};

}  // namespace

std::shared_ptr<ChatBackend> make_http_backend(const LlmConfig& config) {
    config.check();
    return std::make_shared<HttpBackend>(config);
}

MockBackend::MockBackend(std::string model_name) : model_name_(std::move(model_name)) {}

void MockBackend::add_response(const std::string& prompt, const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    by_digest_[request_digest(model_name_, prompt)] = response;
}

void MockBackend::set_resolver(Resolver resolver) {
    std::lock_guard<std::mutex> lock(mutex_);
    resolver_ = std::move(resolver);
}

std::string MockBackend::complete(const std::string& prompt) {
    Resolver resolver;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        const auto it = by_digest_.find(request_digest(model_name_, prompt));
        if (it != by_digest_.end()) return it->second;
        resolver = resolver_;
    }
    if (resolver) {
        if (auto answer = resolver(prompt)) return *answer;
    }
    throw Error(ErrorCode::NetworkError,
                "mock backend has no response for digest " + request_digest(model_name_, prompt));
}

int MockBackend::calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

class LlmGateway::Semaphore {
  public:
    explicit Semaphore(int count) : count_(count) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return count_ > 0; });
        --count_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++count_;
        }
        cv_.notify_one();
    }

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_;
};

LlmGateway::LlmGateway(LlmConfig config, std::filesystem::path cache_dir,
                       std::shared_ptr<ChatBackend> backend, int in_flight_limit)
    : config_(std::move(config)), cache_(std::move(cache_dir)), backend_(std::move(backend)) {
    config_.check();
    if (in_flight_limit < 1) {
        throw Error(ErrorCode::ConfigError, "in_flight_limit must be >= 1");
    }
    if (backend_ == nullptr) {
        throw Error(ErrorCode::ConfigError, "gateway needs a backend");
    }
    slots_ = std::make_unique<Semaphore>(in_flight_limit);
}

LlmGateway::~LlmGateway() = default;

std::string LlmGateway::complete(const std::string& prompt) {
    const std::string digest = request_digest(config_.model_name, prompt);
    if (auto hit = cache_.lookup(digest)) {
        std::lock_guard<std::mutex> lock(stats_mutex_);
        ++stats_.cache_hits;
        return *hit;
    }

    slots_->acquire();
    struct SlotGuard {
        Semaphore* slots;
        ~SlotGuard() { slots->release(); }
    } guard{slots_.get()};

    for (int attempt = 0;; ++attempt) {
        try {
            {
                std::lock_guard<std::mutex> lock(stats_mutex_);
                ++stats_.backend_calls;
            }
            const std::string text = backend_->complete(prompt);
            cache_.store(digest, config_.model_name, prompt, text);
            return text;
        } catch (const Error& err) {
            const bool retriable =
                err.code() == ErrorCode::NetworkError ||
                (err.code() == ErrorCode::HttpError &&
                 (err.http_status() >= 500 || err.http_status() == 429));
            if (!retriable) throw;
            if (attempt >= config_.max_retries) {
                throw Error(ErrorCode::NetworkError,
                            "giving up after " + std::to_string(attempt + 1) +
                                " attempts; last error: " + err.what());
            }
            {
                std::lock_guard<std::mutex> lock(stats_mutex_);
                ++stats_.retries;
            }
            auto delay = config_.retry_initial_delay * (1 << attempt);
            if (delay > std::chrono::milliseconds(30000)) delay = std::chrono::milliseconds(30000);
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
        }
    }
}

GatewayStats LlmGateway::stats() const {
    std::lock_guard<std::mutex> lock(stats_mutex_);
    return stats_;
}

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

namespace {

/// One past the end of the balanced bracket region starting at `start`,
/// honoring JSON strings and escapes; npos when the region never closes.
std::size_t find_balanced_end(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[' || c == '{') {
            ++depth;
        } else if (c == ']' || c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string::npos;
}

std::vector<AspectPair> pairs_from_array(const json& list) {
    std::vector<AspectPair> pairs;
    for (const json& item : list) {
        if (!item.is_object() || !item.contains("aspect") || !item["aspect"].is_string() ||
            !item.contains("sentiment") || !item["sentiment"].is_string()) {
            throw Error(ErrorCode::MalformedJson,
                        "aspect list items need string 'aspect' and 'sentiment' fields");
        }
        const std::string aspect = normalize_aspect_term(item["aspect"].get<std::string>());
        if (aspect.empty()) continue;  // an all-whitespace aspect carries no signal
        pairs.push_back({aspect, polarity_from_string(lowercase(item["sentiment"].get<std::string>()))});
    }
    return pairs;
}

}  // namespace

std::vector<AspectPair> parse_absa_response(const std::string& raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '[' && raw[i] != '{') continue;
        const std::size_t end = find_balanced_end(raw, i);
        if (end == std::string::npos) continue;
        const json parsed = json::parse(raw.substr(i, end - i), nullptr, false);
        if (parsed.is_discarded()) continue;
        // The first region that parses decides the outcome.
        if (parsed.is_array()) return pairs_from_array(parsed);
        if (parsed.contains("aspect")) return pairs_from_array(json::array({parsed}));
        const json* only_list = nullptr;
        int list_count = 0;
        for (const auto& [key, value] : parsed.items()) {
            (void)key;
            if (value.is_array()) {
                ++list_count;
                only_list = &value;
            }
        }
        if (list_count == 1) return pairs_from_array(*only_list);
        throw Error(ErrorCode::MalformedJson, "reply object carries no usable aspect list");
    }
    throw Error(ErrorCode::MalformedJson, "no JSON region found in reply");
}

std::string parse_kpg_response(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw Error(ErrorCode::EmptyGeneration, "model produced an empty reply");

    // Code fences around the reply.
    if (s.rfind("```", 0) == 0) {
        const auto newline = s.find('\n');
        s = newline == std::string::npos ? std::string() : s.substr(newline + 1);
        const auto fence = s.rfind("```");
        if (fence != std::string::npos) s = s.substr(0, fence);
    }
    s = trim(s);

    // "Key point:"-style labels; chain-of-thought replies put the answer
    // after the last one, so keep only what follows it.
    static const std::regex label_re(R"(\b(key\s*point(\s+is)?|kp|answer|output|summary)\s*[:\-]\s*)",
                                     std::regex::icase);
    std::size_t label_end = std::string::npos;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), label_re);
         it != std::sregex_iterator(); ++it) {
        label_end = static_cast<std::size_t>(it->position() + it->length());
    }
    if (label_end != std::string::npos) s = trim(s.substr(label_end));

    // Leading list bullet.
    static const std::regex bullet_re(R"(^\s*(-|\*|\d+[.)])\s+)");
    s = std::regex_replace(s, bullet_re, "", std::regex_constants::format_first_only);

    // Emphasis markers wrapping the whole reply.
    if (s.size() > 4 && s.rfind("**", 0) == 0 && s.compare(s.size() - 2, 2, "**") == 0) {
        s = s.substr(2, s.size() - 4);
    } else if (s.size() > 2 && s.front() == '*' && s.back() == '*') {
        s = s.substr(1, s.size() - 2);
    }

    // Wrapping quotes: take the quoted span, dropping trailing chatter.
    s = trim(s);
    if (!s.empty() && s.front() == '"') {
        const auto closing = s.find('"', 1);
        s = closing == std::string::npos ? s.substr(1) : s.substr(1, closing - 1);
    } else if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'') {
        s = s.substr(1, s.size() - 2);
    }

    s = trim(s);
    const bool usable = std::any_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= 0x80 || std::isalnum(c) != 0;
    });
    if (!usable) throw Error(ErrorCode::EmptyGeneration, "reply has no usable text");

    const auto sentences = split_sentences_text(s);
    if (!sentences.empty()) s = sentences.front();

    const char last = s.back();
    if (last != '.' && last != '!' && last != '?') s += '.';
    return s;
}

}  // namespace pakpa
