#include "pakpa/absa.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "pakpa/jsonl.hpp"

using nlohmann::json;

namespace pakpa {

AbsaRun annotate_corpus(const std::vector<ReviewComment>& comments, LlmGateway& gateway,
                        const PromptTemplate& tpl, int workers) {
    if (comments.empty()) {
        throw Error(ErrorCode::EmptyInput, "no comments to annotate");
    }
    for (const ReviewComment& comment : comments) {
        if (comment.entity.entity_id != comments.front().entity.entity_id) {
            throw Error(ErrorCode::IdMismatch,
                        "comments span entities '" + comments.front().entity.entity_id +
                            "' and '" + comment.entity.entity_id + "'");
        }
    }

    std::vector<std::optional<AspectAnnotation>> results(comments.size());
    std::vector<std::optional<std::string>> errors(comments.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < comments.size(); i = next.fetch_add(1)) {
            try {
                const std::string raw = gateway.complete(render_absa_prompt(tpl, comments[i]));
                results[i] = AspectAnnotation{comments[i].comment_id, parse_absa_response(raw)};
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(comments.size())));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(work);
    for (std::thread& thread : threads) thread.join();

    AbsaRun run;
    run.entity = comments.front().entity;
    for (std::size_t i = 0; i < comments.size(); ++i) {
        if (results[i]) {
            run.annotations.push_back(std::move(*results[i]));
        } else {
            run.failures.push_back({comments[i].comment_id, *errors[i]});
        }
    }
    return run;
}

AbsaGold load_absa_gold(const std::filesystem::path& path) {
    AbsaGold gold;
    std::size_t line = 0;
    for (const json& record : read_jsonl(path)) {
        ++line;
        const std::string where = path.filename().string() + " record " + std::to_string(line);
        if (!record.contains("comment_id") || !record["comment_id"].is_string()) {
            throw Error(ErrorCode::MissingField, "'comment_id' in " + where);
        }
        if (!record.contains("gold") || record["gold"] != true) {
            throw Error(ErrorCode::MissingField, "'gold': true in " + where);
        }
        if (!record.contains("pairs") || !record["pairs"].is_array()) {
            throw Error(ErrorCode::MissingField, "'pairs' in " + where);
        }
        const std::string comment_id = record["comment_id"].get<std::string>();
        if (gold.by_comment.count(comment_id) > 0) {
            throw Error(ErrorCode::DuplicateId, "comment '" + comment_id + "' in " + where);
        }
        std::vector<AspectPair> pairs;
        for (const json& pair : record["pairs"]) {
            if (!pair.contains("aspect") || !pair["aspect"].is_string() ||
                !pair.contains("sentiment") || !pair["sentiment"].is_string()) {
                throw Error(ErrorCode::MissingField, "'aspect'/'sentiment' in " + where);
            }
            pairs.push_back({normalize_aspect_term(pair["aspect"].get<std::string>()),
                             polarity_from_string(lowercase(pair["sentiment"].get<std::string>()))});
        }
        gold.by_comment.emplace(comment_id, std::move(pairs));
    }
    return gold;
}

namespace {

/// Pred annotations keyed by comment id, enforcing that pred and gold talk
/// about exactly the same comments.
std::map<std::string, const AspectAnnotation*> align_ids(const AbsaRun& pred,
                                                         const AbsaGold& gold) {
    std::map<std::string, const AspectAnnotation*> by_id;
    for (const AspectAnnotation& annotation : pred.annotations) {
        by_id[annotation.comment_id] = &annotation;
    }
    for (const auto& [comment_id, pairs] : gold.by_comment) {
        (void)pairs;
        if (by_id.count(comment_id) == 0) {
            throw Error(ErrorCode::IdMismatch, "gold comment '" + comment_id + "' has no prediction");
        }
    }
    for (const auto& [comment_id, annotation] : by_id) {
        (void)annotation;
        if (gold.by_comment.count(comment_id) == 0) {
            throw Error(ErrorCode::IdMismatch,
                        "predicted comment '" + comment_id + "' has no gold labels");
        }
    }
    return by_id;
}

F1Score f1_from_counts(long tp, long fp, long fn) {
    F1Score score;
    score.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    score.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    score.f1 = score.precision + score.recall > 0.0
                   ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                   : 0.0;
    return score;
}

}  // namespace

F1Score score_ae(const AbsaRun& pred, const AbsaGold& gold) {
    const auto by_id = align_ids(pred, gold);
    long tp = 0;
    long fp = 0;
    long fn = 0;
    for (const auto& [comment_id, annotation] : by_id) {
        std::set<std::string> predicted;
        for (const AspectPair& pair : annotation->pairs) {
            predicted.insert(normalize_aspect_term(pair.aspect));
        }
        std::set<std::string> expected;
        for (const AspectPair& pair : gold.by_comment.at(comment_id)) {
            expected.insert(normalize_aspect_term(pair.aspect));
        }
        for (const std::string& term : predicted) {
            if (expected.count(term) > 0) {
                ++tp;
            } else {
                ++fp;
            }
        }
        for (const std::string& term : expected) {
            if (predicted.count(term) == 0) ++fn;
        }
    }
    return f1_from_counts(tp, fp, fn);
}

F1Score score_asc(const AbsaRun& pred, const AbsaGold& gold) {
    const auto by_id = align_ids(pred, gold);
    long correct = 0;
    long substituted = 0;
    long missed = 0;
    for (const auto& [comment_id, annotation] : by_id) {
        std::map<std::string, Polarity> predicted;
        for (const AspectPair& pair : annotation->pairs) {
            predicted.emplace(normalize_aspect_term(pair.aspect), pair.sentiment);
        }
        std::map<std::string, Polarity> expected;
        for (const AspectPair& pair : gold.by_comment.at(comment_id)) {
            expected.emplace(normalize_aspect_term(pair.aspect), pair.sentiment);
        }
        for (const auto& [term, polarity] : expected) {
            const auto found = predicted.find(term);
            if (found == predicted.end()) {
                ++missed;
            } else if (found->second == polarity) {
                ++correct;
            } else {
                ++substituted;
            }
        }
    }
    // Classification view: a wrong label hurts both precision and recall, a
    // gold term the prediction never labeled hurts recall only.
    return f1_from_counts(correct, substituted, substituted + missed);
}

}  // namespace pakpa
