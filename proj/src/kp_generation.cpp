#include "pakpa/kp_generation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace pakpa {

namespace {

/// Key under which generated texts are compared for the duplicate collapse:
/// case, spacing and terminal punctuation do not make two key points distinct.
std::string dedup_key(const std::string& text) {
    std::string key = collapse_whitespace(lowercase(trim(text)));
    while (!key.empty() && (key.back() == '.' || key.back() == '!' || key.back() == '?')) {
        key.pop_back();
    }
    return key;
}

bool summary_order(const KeyPoint& a, const KeyPoint& b) {
    if (a.polarity != b.polarity) return a.polarity < b.polarity;
    if (a.prevalence() != b.prevalence()) return a.prevalence() > b.prevalence();
    return a.cluster_id < b.cluster_id;
}

}  // namespace

EntitySummary generate_keypoints(const std::vector<AspectCluster>& clusters,
                                 const std::vector<ReviewComment>& comments, LlmGateway& gateway,
                                 const PromptTemplate& tpl, int min_prevalence, int workers,
                                 std::vector<GenerationSkip>* skips) {
    if (min_prevalence < 1) {
        throw Error(ErrorCode::ConfigError, "min_prevalence must be >= 1");
    }
    if (comments.empty()) {
        throw Error(ErrorCode::EmptyInput, "no comments supplied with the clusters");
    }
    std::map<std::string, const ReviewComment*> by_id;
    for (const ReviewComment& comment : comments) by_id[comment.comment_id] = &comment;

    auto log_skip = [&](int cluster_id, std::string reason) {
        if (skips != nullptr) skips->push_back({cluster_id, std::move(reason)});
    };

    // Pick the clusters worth summarizing and resolve their member texts up
    // front, so worker threads only talk to the gateway.
    std::vector<const AspectCluster*> eligible;
    std::vector<std::vector<std::string>> member_texts;
    for (const AspectCluster& cluster : clusters) {
        if (cluster.prevalence() < min_prevalence) {
            log_skip(cluster.cluster_id, "prevalence " + std::to_string(cluster.prevalence()) +
                                             " below floor " + std::to_string(min_prevalence));
            continue;
        }
        std::vector<std::string> texts;
        for (const std::string& comment_id : cluster.member_comment_ids) {
            const auto found = by_id.find(comment_id);
            if (found == by_id.end()) {
                throw Error(ErrorCode::UnknownComment,
                            "cluster " + std::to_string(cluster.cluster_id) + " references '" +
                                comment_id + "' which is not among the comments");
            }
            texts.push_back(found->second->text);
        }
        eligible.push_back(&cluster);
        member_texts.push_back(std::move(texts));
    }

    std::vector<std::optional<std::string>> generated(eligible.size());
    std::vector<std::optional<std::string>> errors(eligible.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < eligible.size(); i = next.fetch_add(1)) {
            try {
                const std::string raw =
                    gateway.complete(render_kpg_prompt(tpl, *eligible[i], member_texts[i]));
                generated[i] = parse_kpg_response(raw);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int thread_count =
        std::max(1, std::min<int>(workers, static_cast<int>(eligible.size())));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(work);
    for (std::thread& thread : threads) thread.join();

    // Assemble in input order, collapsing duplicate texts onto the
    // higher-prevalence cluster (input order already ranks equals).
    std::vector<KeyPoint> key_points;
    std::map<std::string, std::size_t> seen_texts;  // dedup key -> index into key_points
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        const AspectCluster& cluster = *eligible[i];
        if (!generated[i]) {
            log_skip(cluster.cluster_id, "generation failed: " + *errors[i]);
            continue;
        }
        const std::string key = dedup_key(*generated[i]);
        const auto seen = seen_texts.find(key);
        if (seen != seen_texts.end()) {
            KeyPoint& winner = key_points[seen->second];
            if (cluster.prevalence() > winner.prevalence()) {
                log_skip(winner.cluster_id, "text duplicates cluster " +
                                                std::to_string(cluster.cluster_id) +
                                                " with higher prevalence");
                winner = KeyPoint{*generated[i], cluster.polarity, cluster.cluster_id,
                                  cluster.member_comment_ids};
            } else {
                log_skip(cluster.cluster_id, "text duplicates cluster " +
                                                 std::to_string(winner.cluster_id) +
                                                 " with higher prevalence");
            }
            continue;
        }
        seen_texts.emplace(key, key_points.size());
        key_points.push_back(
            {*generated[i], cluster.polarity, cluster.cluster_id, cluster.member_comment_ids});
    }
    std::stable_sort(key_points.begin(), key_points.end(), summary_order);

    EntitySummary summary;
    summary.entity = comments.front().entity;
    summary.key_points = std::move(key_points);
    summary.generated_at = iso_utc_now();
    summary.llm_model = gateway.config().model_name;
    return summary;
}

std::vector<KeyPoint> select_top_k(const EntitySummary& summary, int k, Polarity polarity) {
    if (k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    std::vector<KeyPoint> selected;
    for (const KeyPoint& kp : summary.key_points) {
        if (kp.polarity == polarity) selected.push_back(kp);
    }
    std::stable_sort(selected.begin(), selected.end(), summary_order);
    if (selected.size() > static_cast<std::size_t>(k)) {
        selected.resize(static_cast<std::size_t>(k));
    }
    return selected;
}

double review_coverage(const EntitySummary& summary, const std::vector<ReviewComment>& comments) {
    if (comments.empty()) return 0.0;
    std::set<std::string> all_ids;
    for (const ReviewComment& comment : comments) all_ids.insert(comment.comment_id);
    std::set<std::string> covered;
    for (const KeyPoint& kp : summary.key_points) {
        for (const std::string& comment_id : kp.matched_comment_ids) {
            if (all_ids.count(comment_id) > 0) covered.insert(comment_id);
        }
    }
    return static_cast<double>(covered.size()) / static_cast<double>(all_ids.size());
}

json summary_to_json(const EntitySummary& summary) {
    json key_points = json::array();
    for (const KeyPoint& kp : summary.key_points) {
        key_points.push_back(json{{"text", kp.text},
                                  {"polarity", to_string(kp.polarity)},
                                  {"prevalence", kp.prevalence()},
                                  {"comment_ids", kp.matched_comment_ids}});
    }
    return json{{"entity_id", summary.entity.entity_id},
                {"model", summary.llm_model},
                {"key_points", std::move(key_points)}};
}

EntitySummary summary_from_json(const json& j) {
    try {
        EntitySummary summary;
        summary.entity.entity_id = j.at("entity_id").get<std::string>();
        summary.llm_model = j.at("model").get<std::string>();
        int position = 0;
        for (const json& kp_json : j.at("key_points")) {
            KeyPoint kp;
            kp.text = kp_json.at("text").get<std::string>();
            kp.polarity = polarity_from_string(kp_json.at("polarity").get<std::string>());
            // The file omits cluster ids; position preserves the stored order.
            kp.cluster_id = position++;
            for (const auto& comment_id : kp_json.at("comment_ids")) {
                kp.matched_comment_ids.insert(comment_id.get<std::string>());
            }
            summary.key_points.push_back(std::move(kp));
        }
        return summary;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("summary record: ") + e.what());
    }
}

}  // namespace pakpa
