#include "pakpa/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pakpa/jsonl.hpp"

using nlohmann::json;

namespace pakpa {

namespace {

struct Artifacts {
    std::filesystem::path comments;
    std::filesystem::path absa;
    std::filesystem::path absa_failures;
    std::filesystem::path clusters;
    std::filesystem::path summaries;
    std::filesystem::path reports_dir;
    std::filesystem::path eval_report;

    explicit Artifacts(const std::filesystem::path& out)
        : comments(out / "comments.jsonl"),
          absa(out / "absa.jsonl"),
          absa_failures(out / "absa_failures.jsonl"),
          clusters(out / "clusters.jsonl"),
          summaries(out / "summaries.jsonl"),
          reports_dir(out / "reports"),
          eval_report(out / "eval_report.json") {}
};

void require_artifact(const std::filesystem::path& path, const std::string& producer) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::MissingArtifact,
                    path.string() + " not found; run the '" + producer + "' stage first");
    }
}

std::vector<ReviewComment> read_comments_artifact(const Artifacts& artifacts) {
    require_artifact(artifacts.comments, "ingest");
    std::vector<ReviewComment> comments;
    for (const json& record : read_jsonl(artifacts.comments)) {
        comments.push_back(comment_from_json(record));
    }
    return comments;
}

std::vector<AspectAnnotation> read_absa_artifact(const Artifacts& artifacts) {
    require_artifact(artifacts.absa, "absa");
    std::vector<AspectAnnotation> annotations;
    for (const json& record : read_jsonl(artifacts.absa)) {
        annotations.push_back(annotation_from_json(record));
    }
    return annotations;
}

/// Clusters artifact line: {"entity_id","polarity","clusters":[...]} with the
/// polarity held once at line level, not repeated per cluster.
json clusters_line(const EntityRef& entity, Polarity polarity,
                   const std::vector<AspectCluster>& clusters) {
    json list = json::array();
    for (const AspectCluster& cluster : clusters) {
        json terms = json::array();
        for (const TermFreq& term : cluster.terms) {
            terms.push_back(json{{"term", term.term}, {"freq", term.freq}});
        }
        list.push_back(json{{"cluster_id", cluster.cluster_id},
                            {"terms", std::move(terms)},
                            {"comment_ids", cluster.member_comment_ids},
                            {"prevalence", cluster.prevalence()}});
    }
    return json{{"entity_id", entity.entity_id},
                {"polarity", to_string(polarity)},
                {"clusters", std::move(list)}};
}

std::map<std::string, std::vector<AspectCluster>> read_clusters_artifact(
    const Artifacts& artifacts) {
    require_artifact(artifacts.clusters, "cluster");
    // Per entity, clusters arrive in file order: the positive line's clusters
    // first, then the negative line's.
    std::map<std::string, std::vector<AspectCluster>> by_entity;
    for (const json& record : read_jsonl(artifacts.clusters)) {
        const std::string entity_id = record.at("entity_id").get<std::string>();
        const Polarity polarity = polarity_from_string(record.at("polarity").get<std::string>());
        for (const json& cluster_json : record.at("clusters")) {
            AspectCluster cluster;
            cluster.cluster_id = cluster_json.at("cluster_id").get<int>();
            cluster.polarity = polarity;
            for (const json& term : cluster_json.at("terms")) {
                cluster.terms.push_back(
                    {term.at("term").get<std::string>(), term.at("freq").get<int>()});
            }
            for (const auto& comment_id : cluster_json.at("comment_ids")) {
                cluster.member_comment_ids.insert(comment_id.get<std::string>());
            }
            by_entity[entity_id].push_back(std::move(cluster));
        }
    }
    return by_entity;
}

std::map<std::string, std::vector<ReviewComment>> group_by_entity(
    const std::vector<ReviewComment>& comments) {
    std::map<std::string, std::vector<ReviewComment>> grouped;
    for (const ReviewComment& comment : comments) {
        grouped[comment.entity.entity_id].push_back(comment);
    }
    return grouped;
}

std::string safe_filename(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (c == '/' || c == '\\') c = '_';
    }
    return out;
}

// -----------------------------------------------------------------------
// Mock backend: canned replies keyed by the input block of each prompt.
// -----------------------------------------------------------------------

std::string last_marked_line(const std::string& prompt, const std::string& marker) {
    const auto at = prompt.rfind(marker);
    if (at == std::string::npos) return {};
    const auto start = at + marker.size();
    const auto end = prompt.find('\n', start);
    return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

std::shared_ptr<ChatBackend> make_mock_backend(const std::string& model_name,
                                               const std::filesystem::path& path) {
    const json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::ParseError, "mock annotations file " + path.string() +
                                               " is not a JSON object");
    }
    auto absa_replies = std::make_shared<std::map<std::string, std::string>>();
    auto kpg_replies = std::make_shared<std::map<std::string, std::string>>();
    if (doc.contains("absa")) {
        for (const auto& [comment_text, reply] : doc["absa"].items()) {
            (*absa_replies)[comment_text] = reply.get<std::string>();
        }
    }
    if (doc.contains("kpg")) {
        for (const auto& [term_key, reply] : doc["kpg"].items()) {
            (*kpg_replies)[term_key] = reply.get<std::string>();
        }
    }

    auto backend = std::make_shared<MockBackend>(model_name);
    backend->set_resolver([absa_replies, kpg_replies](
                              const std::string& prompt) -> std::optional<std::string> {
        const std::string comment = last_marked_line(prompt, "\nComment: ");
        if (!comment.empty()) {
            const auto found = absa_replies->find(comment);
            if (found != absa_replies->end()) return found->second;
        }
        const std::string terms = last_marked_line(prompt, "\nAspect terms: ");
        if (!terms.empty()) {
            std::string key;
            std::string term;
            std::istringstream stream(terms);
            while (std::getline(stream, term, ',')) {
                if (!key.empty()) key += '|';
                key += trim(term);
            }
            const auto found = kpg_replies->find(key);
            if (found != kpg_replies->end()) return found->second;
        }
        return std::nullopt;
    });
    return backend;
}

// -----------------------------------------------------------------------
// Stages
// -----------------------------------------------------------------------

void run_ingest(const PipelineConfig& config, const Artifacts& artifacts) {
    if (config.corpus_path.empty()) {
        throw Error(ErrorCode::ConfigError, "corpus path is required for ingest");
    }
    const auto reviews = load_corpus(config.corpus_path, config.format);
    const auto kept = apply_filters(reviews, config.filter);
    const auto comments = corpus_to_comments(kept);

    std::vector<json> lines;
    lines.reserve(comments.size());
    for (const ReviewComment& comment : comments) lines.push_back(to_json(comment));
    write_jsonl_atomic(artifacts.comments, lines);
    std::cerr << "ingest: " << reviews.size() << " reviews, " << kept.size()
              << " after filtering, " << comments.size() << " comments\n";
}

void run_absa(const PipelineConfig& config, const Artifacts& artifacts) {
    const auto comments = read_comments_artifact(artifacts);
    const PromptTemplate tpl = load_template(config.prompts_dir / "absa_fewshot.json");
    LlmGateway gateway = make_gateway(config);

    std::vector<json> annotation_lines;
    std::vector<json> failure_lines;
    for (const auto& [entity_id, entity_comments] : group_by_entity(comments)) {
        (void)entity_id;
        const AbsaRun run = annotate_corpus(entity_comments, gateway, tpl, config.parallel);
        for (const AspectAnnotation& annotation : run.annotations) {
            annotation_lines.push_back(to_json(annotation));
        }
        for (const AbsaFailure& failure : run.failures) {
            failure_lines.push_back(
                json{{"comment_id", failure.comment_id}, {"error", failure.error}});
        }
    }
    write_jsonl_atomic(artifacts.absa, annotation_lines);
    write_jsonl_atomic(artifacts.absa_failures, failure_lines);
    const GatewayStats stats = gateway.stats();
    std::cerr << "absa: " << annotation_lines.size() << " annotated, " << failure_lines.size()
              << " failed (cache hits " << stats.cache_hits << ", backend calls "
              << stats.backend_calls << ")\n";
}

void run_cluster(const PipelineConfig& config, const Artifacts& artifacts) {
    const auto comments = read_comments_artifact(artifacts);
    const auto annotations = read_absa_artifact(artifacts);
    if (config.vectors_path.empty()) {
        throw Error(ErrorCode::ConfigError, "vectors path is required for cluster");
    }
    const VectorStore store = load_vectors(config.vectors_path);
    for (const std::string& warning : store.warnings) {
        std::cerr << "vectors: " << warning << "\n";
    }
    ClusteringParams params;
    params.lambda_threshold = config.lambda;
    params.check();

    std::vector<json> lines;
    std::size_t total = 0;
    for (const auto& [entity, pools] : build_pools(annotations, comments)) {
        const auto positive = cluster_pool(pools.positive, store, params);
        const auto negative = cluster_pool(pools.negative, store, params);
        total += positive.size() + negative.size();
        lines.push_back(clusters_line(entity, Polarity::Positive, positive));
        lines.push_back(clusters_line(entity, Polarity::Negative, negative));
    }
    write_jsonl_atomic(artifacts.clusters, lines);
    std::cerr << "cluster: " << total << " clusters across " << lines.size() / 2
              << " entities\n";
}

void run_generate(const PipelineConfig& config, const Artifacts& artifacts) {
    const auto comments = read_comments_artifact(artifacts);
    const auto clusters_by_entity = read_clusters_artifact(artifacts);
    const PromptTemplate tpl = load_template(config.prompts_dir / "kpg_oneshot.json");
    LlmGateway gateway = make_gateway(config);
    const auto grouped = group_by_entity(comments);

    std::vector<json> summary_lines;
    std::filesystem::create_directories(artifacts.reports_dir);
    for (const auto& [entity_id, entity_clusters] : clusters_by_entity) {
        const auto entity_comments = grouped.find(entity_id);
        if (entity_comments == grouped.end()) {
            throw Error(ErrorCode::UnknownComment,
                        "clusters reference entity '" + entity_id + "' with no comments");
        }
        std::vector<GenerationSkip> skips;
        const EntitySummary summary =
            generate_keypoints(entity_clusters, entity_comments->second, gateway, tpl,
                               config.min_prevalence, config.parallel, &skips);
        for (const GenerationSkip& skip : skips) {
            std::cerr << "generate: " << entity_id << " cluster " << skip.cluster_id << ": "
                      << skip.reason << "\n";
        }
        summary_lines.push_back(summary_to_json(summary));

        std::map<std::string, std::string> texts;
        for (const ReviewComment& comment : entity_comments->second) {
            texts[comment.comment_id] = comment.text;
        }
        write_text_atomic(artifacts.reports_dir / (safe_filename(entity_id) + ".txt"),
                          render_report(summary, texts));
    }
    write_jsonl_atomic(artifacts.summaries, summary_lines);
    const GatewayStats stats = gateway.stats();
    std::cerr << "generate: " << summary_lines.size() << " summaries (cache hits "
              << stats.cache_hits << ", backend calls " << stats.backend_calls << ")\n";
}

SimilarityScorer make_scorer(const PipelineConfig& config) {
    switch (config.scorer) {
        case ScorerKind::LexicalF1:
            return SimilarityScorer::lexical();
        case ScorerKind::EmbeddingCosine: {
            if (config.vectors_path.empty()) {
                throw Error(ErrorCode::ConfigError,
                            "vectors path is required for the embedding scorer");
            }
            return SimilarityScorer::embedding(
                std::make_shared<VectorStore>(load_vectors(config.vectors_path)));
        }
        case ScorerKind::External:
            if (config.scorer_endpoint.empty()) {
                throw Error(ErrorCode::ConfigError,
                            "scorer endpoint is required for the external scorer");
            }
            return SimilarityScorer::external(config.scorer_endpoint, config.llm.timeout);
    }
    throw Error(ErrorCode::ConfigError, "unhandled scorer kind");
}

void run_evaluate(const PipelineConfig& config, const Artifacts& artifacts) {
    require_artifact(artifacts.summaries, "generate");
    if (config.references_path.empty()) {
        throw Error(ErrorCode::ConfigError, "references path is required for evaluate");
    }
    const auto references = load_references(config.references_path);
    std::vector<EntitySummary> summaries;
    for (const json& record : read_jsonl(artifacts.summaries)) {
        summaries.push_back(summary_from_json(record));
    }
    const LexiconClassifier classifier = load_lexicon_classifier(
        config.lexicon_dir / "positive_words.txt", config.lexicon_dir / "negative_words.txt");
    const SimilarityScorer scorer = make_scorer(config);

    std::vector<Polarity> polarities;
    if (config.polarity_filter) {
        polarities.push_back(*config.polarity_filter);
    } else {
        polarities = {Polarity::Positive, Polarity::Negative};
    }

    json per_entity = json::object();
    double rouge_sums[3] = {0.0, 0.0, 0.0};
    double sp_sum = 0.0;
    double sr_sum = 0.0;
    int cells = 0;
    for (const EntitySummary& summary : summaries) {
        const auto found = references.find(summary.entity.entity_id);
        if (found == references.end()) {
            std::cerr << "evaluate: no references for " << summary.entity.entity_id
                      << ", skipped\n";
            continue;
        }
        const auto [positive_refs, negative_refs] =
            split_references_by_polarity(found->second, classifier);
        json entity_report = json::object();
        for (const Polarity polarity : polarities) {
            std::vector<std::string> candidates;
            for (const KeyPoint& kp : summary.key_points) {
                if (kp.polarity == polarity) candidates.push_back(kp.text);
            }
            const auto& refs = polarity == Polarity::Positive ? positive_refs : negative_refs;
            if (candidates.empty() || refs.empty()) {
                std::cerr << "evaluate: " << summary.entity.entity_id << "/"
                          << to_string(polarity) << " skipped (no "
                          << (candidates.empty() ? "key points" : "references") << ")\n";
                continue;
            }
            const double r1 = rouge_max_avg(candidates, refs, RougeVariant::Rouge1);
            const double r2 = rouge_max_avg(candidates, refs, RougeVariant::Rouge2);
            const double rl = rouge_max_avg(candidates, refs, RougeVariant::RougeL);
            const SoftScores soft = soft_scores(candidates, refs, scorer);
            rouge_sums[0] += r1;
            rouge_sums[1] += r2;
            rouge_sums[2] += rl;
            sp_sum += soft.sp;
            sr_sum += soft.sr;
            ++cells;
            entity_report[to_string(polarity)] =
                json{{"rouge_1", r1},         {"rouge_2", r2}, {"rouge_l", rl},
                     {"soft_precision", soft.sp}, {"soft_recall", soft.sr},
                     {"soft_f1", soft.sf1}};
        }
        if (!entity_report.empty()) {
            per_entity[summary.entity.entity_id] = std::move(entity_report);
        }
    }

    json report;
    report["scorer"] = to_string(config.scorer);
    report["per_entity"] = std::move(per_entity);
    if (cells > 0) {
        const double sp = sp_sum / cells;
        const double sr = sr_sum / cells;
        report["rouge"] = json{{"rouge_1", rouge_sums[0] / cells},
                               {"rouge_2", rouge_sums[1] / cells},
                               {"rouge_l", rouge_sums[2] / cells}};
        report["soft"] = json{{"soft_precision", sp},
                              {"soft_recall", sr},
                              {"soft_f1", sp + sr > 0.0 ? 2.0 * sp * sr / (sp + sr) : 0.0}};
    }

    // Review coverage per entity, when the comments artifact is around.
    if (std::filesystem::exists(artifacts.comments)) {
        const auto grouped = group_by_entity(read_comments_artifact(artifacts));
        json coverage = json::object();
        for (const EntitySummary& summary : summaries) {
            const auto found = grouped.find(summary.entity.entity_id);
            if (found != grouped.end()) {
                coverage[summary.entity.entity_id] = review_coverage(summary, found->second);
            }
        }
        report["review_coverage"] = std::move(coverage);
    }

    // Benchmark harness outputs, each keyed to an optional input file.
    if (!config.gold_path.empty()) {
        const AbsaGold gold = load_absa_gold(config.gold_path);
        AbsaRun pred;
        for (const AspectAnnotation& annotation : read_absa_artifact(artifacts)) {
            if (gold.by_comment.count(annotation.comment_id) > 0) {
                pred.annotations.push_back(annotation);
            }
        }
        const F1Score ae = score_ae(pred, gold);
        const F1Score asc = score_asc(pred, gold);
        report["absa_benchmark"] =
            json{{"aspect_extraction",
                  json{{"precision", ae.precision}, {"recall", ae.recall}, {"f1", ae.f1}}},
                 {"sentiment_classification",
                  json{{"precision", asc.precision}, {"recall", asc.recall}, {"f1", asc.f1}}}};
    }

    if (!config.matches_path.empty()) {
        const auto comments = read_comments_artifact(artifacts);
        std::map<std::string, Category> category_of;
        for (const ReviewComment& comment : comments) {
            category_of[comment.comment_id] = comment.entity.category;
        }
        const MatchAnnotationSet matches = load_match_records(config.matches_path);
        const AnnotatorFilterResult filter = annotator_kappa_filter(matches.records);
        const auto verdicts = aggregate_matches(filter_records(matches.records, filter));
        std::map<Category, std::vector<MatchVerdict>> by_category;
        for (const MatchVerdict& verdict : verdicts) {
            const auto found = category_of.find(verdict.comment_id);
            if (found == category_of.end()) {
                throw Error(ErrorCode::UnknownComment,
                            "match annotation references unknown comment '" + verdict.comment_id +
                                "'");
            }
            by_category[found->second].push_back(verdict);
        }
        const QuantificationReport quantification = quantification_precision(by_category);
        json per_category = json::object();
        for (const auto& [category, precision] : quantification.per_category) {
            per_category[to_string(category)] = json{{"correct", precision.correct},
                                                     {"total", precision.total},
                                                     {"precision", precision.precision}};
        }
        json excluded = json::object();
        for (const auto& [annotator, kappa] : filter.excluded) {
            excluded[annotator] = kappa;
        }
        report["quantification"] = json{{"per_category", std::move(per_category)},
                                        {"average", quantification.average},
                                        {"excluded_annotators", std::move(excluded)}};
    }

    if (!config.judgments_path.empty()) {
        json by_dimension = json::object();
        for (const auto& [dimension, judgments] : load_pairwise_judgments(config.judgments_path)) {
            const std::vector<double> scores = bradley_terry(judgments);
            json scored = json::object();
            for (std::size_t i = 0; i < judgments.systems.size(); ++i) {
                scored[judgments.systems[i]] = scores[i];
            }
            by_dimension[to_string(dimension)] = std::move(scored);
        }
        report["bradley_terry"] = std::move(by_dimension);
    }

    write_text_atomic(artifacts.eval_report, report.dump(2) + "\n");
    std::cerr << "evaluate: report written to " << artifacts.eval_report.string() << "\n";
}

}  // namespace

void PipelineConfig::check() const {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(ErrorCode::ConfigError,
                    "lambda must be in (0, 1), got " + std::to_string(lambda));
    }
    if (min_prevalence < 1) throw Error(ErrorCode::ConfigError, "min_prevalence must be >= 1");
    if (parallel < 1) throw Error(ErrorCode::ConfigError, "parallel must be >= 1");
    if (output_dir.empty()) throw Error(ErrorCode::ConfigError, "output dir must not be empty");
    if (cache_dir.empty()) throw Error(ErrorCode::ConfigError, "cache dir must not be empty");
    llm.check();
    filter.check();
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::Absa: return "absa";
        case Stage::Cluster: return "cluster";
        case Stage::Generate: return "generate";
        case Stage::Evaluate: return "evaluate";
        case Stage::Pipeline: return "pipeline";
    }
    throw Error(ErrorCode::ConfigError, "unhandled stage");
}

Stage stage_from_string(const std::string& name) {
    if (name == "ingest") return Stage::Ingest;
    if (name == "absa") return Stage::Absa;
    if (name == "cluster") return Stage::Cluster;
    if (name == "generate") return Stage::Generate;
    if (name == "evaluate") return Stage::Evaluate;
    if (name == "pipeline") return Stage::Pipeline;
    throw Error(ErrorCode::ConfigError, "unknown stage '" + name + "'");
}

LlmGateway make_gateway(const PipelineConfig& config) {
    std::shared_ptr<ChatBackend> backend;
    if (!config.mock_annotations.empty()) {
        backend = make_mock_backend(config.llm.model_name, config.mock_annotations);
    } else {
        backend = make_http_backend(config.llm);
    }
    return {config.llm, config.cache_dir, std::move(backend), config.parallel};
}

std::string render_report(const EntitySummary& summary,
                          const std::map<std::string, std::string>& comment_texts) {
    std::ostringstream out;
    out << "entity: " << summary.entity.entity_id << "\n";
    out << "model: " << summary.llm_model << "\n";
    out << "key points: " << summary.key_points.size() << "\n";
    int rank = 0;
    for (const KeyPoint& kp : summary.key_points) {
        out << "\n" << ++rank << ". " << kp.text << "\n";
        out << "   polarity: " << to_string(kp.polarity) << "\n";
        out << "   prevalence: " << kp.prevalence() << "\n";
        out << "   sample comments:\n";
        int shown = 0;
        for (const std::string& comment_id : kp.matched_comment_ids) {
            if (shown == 2) break;
            const auto found = comment_texts.find(comment_id);
            if (found == comment_texts.end()) continue;
            out << "   - " << found->second << "\n";
            ++shown;
        }
    }
    return out.str();
}

void run_stage(Stage stage, const PipelineConfig& config) {
    config.check();
    std::filesystem::create_directories(config.output_dir);
    const Artifacts artifacts(config.output_dir);
    switch (stage) {
        case Stage::Ingest: run_ingest(config, artifacts); return;
        case Stage::Absa: run_absa(config, artifacts); return;
        case Stage::Cluster: run_cluster(config, artifacts); return;
        case Stage::Generate: run_generate(config, artifacts); return;
        case Stage::Evaluate: run_evaluate(config, artifacts); return;
        case Stage::Pipeline:
            run_ingest(config, artifacts);
            run_absa(config, artifacts);
            run_cluster(config, artifacts);
            run_generate(config, artifacts);
            if (!config.references_path.empty()) {
                run_evaluate(config, artifacts);
            } else {
                std::cerr << "pipeline: no references configured, evaluate skipped\n";
            }
            return;
    }
    throw Error(ErrorCode::ConfigError, "unhandled stage");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    const json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::ParseError, "config file " + path.string() + " is not a JSON object");
    }
    PipelineConfig config;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "format") {
                config.format = corpus_format_from_string(value.get<std::string>());
            } else if (key == "corpus") {
                config.corpus_path = value.get<std::string>();
            } else if (key == "vectors") {
                config.vectors_path = value.get<std::string>();
            } else if (key == "endpoint") {
                config.llm.endpoint_url = value.get<std::string>();
            } else if (key == "model") {
                config.llm.model_name = value.get<std::string>();
            } else if (key == "api_key_env") {
                config.llm.api_key_env_var = value.get<std::string>();
            } else if (key == "temperature") {
                config.llm.temperature = value.get<double>();
            } else if (key == "max_tokens") {
                config.llm.max_tokens = value.get<int>();
            } else if (key == "timeout_ms") {
                config.llm.timeout = std::chrono::milliseconds(value.get<long>());
            } else if (key == "max_retries") {
                config.llm.max_retries = value.get<int>();
            } else if (key == "retry_initial_delay_ms") {
                config.llm.retry_initial_delay = std::chrono::milliseconds(value.get<long>());
            } else if (key == "lambda") {
                config.lambda = value.get<double>();
            } else if (key == "min_prevalence") {
                config.min_prevalence = value.get<int>();
            } else if (key == "cache_dir") {
                config.cache_dir = value.get<std::string>();
            } else if (key == "out") {
                config.output_dir = value.get<std::string>();
            } else if (key == "scorer") {
                config.scorer = scorer_kind_from_string(value.get<std::string>());
            } else if (key == "scorer_endpoint") {
                config.scorer_endpoint = value.get<std::string>();
            } else if (key == "polarity") {
                config.polarity_filter = polarity_from_string(value.get<std::string>());
            } else if (key == "parallel") {
                config.parallel = value.get<int>();
            } else if (key == "prompts_dir") {
                config.prompts_dir = value.get<std::string>();
            } else if (key == "lexicon_dir") {
                config.lexicon_dir = value.get<std::string>();
            } else if (key == "mock_annotations") {
                config.mock_annotations = value.get<std::string>();
            } else if (key == "references") {
                config.references_path = value.get<std::string>();
            } else if (key == "judgments") {
                config.judgments_path = value.get<std::string>();
            } else if (key == "matches") {
                config.matches_path = value.get<std::string>();
            } else if (key == "gold") {
                config.gold_path = value.get<std::string>();
            } else if (key == "max_sentences") {
                config.filter.max_sentences_per_review = value.get<int>();
            } else if (key == "min_reviews") {
                config.filter.min_reviews_per_entity = value.get<int>();
            } else if (key == "max_reviews") {
                config.filter.max_reviews_per_entity = value.get<int>();
            } else if (key == "top_entities") {
                config.filter.top_entities_per_category = value.get<int>();
            } else {
                throw Error(ErrorCode::ConfigError,
                            "unknown config key '" + key + "' in " + path.string());
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ConfigError,
                        "config key '" + key + "' in " + path.string() + ": " + e.what());
        }
    }
    return config;
}

}  // namespace pakpa
