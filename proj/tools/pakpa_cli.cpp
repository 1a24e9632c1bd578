#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "pakpa/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Aspect-based key point summarization for review corpora"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::string format;
    std::string corpus;
    std::string vectors;
    std::string endpoint;
    std::string model;
    std::string api_key_env;
    double temperature = 0.0;
    int max_tokens = 0;
    long timeout_ms = 0;
    int max_retries = 0;
    double lambda = 0.0;
    int min_prevalence = 0;
    std::string cache_dir;
    std::string out_dir;
    std::string scorer;
    std::string scorer_endpoint;
    std::string polarity;
    int parallel = 0;
    std::string prompts_dir;
    std::string lexicon_dir;
    std::string mock_annotations;
    std::string references;
    std::string judgments;
    std::string matches;
    std::string gold;
    int max_sentences = 0;
    int min_reviews = 0;
    int max_reviews = 0;
    int top_entities = 0;

    auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override");
    auto* o_format = app.add_option("--format", format, "Corpus format: yelp or space");
    auto* o_corpus = app.add_option("--corpus", corpus, "Raw review corpus path");
    auto* o_vectors = app.add_option("--vectors", vectors, "Word vector table path");
    auto* o_endpoint = app.add_option("--endpoint", endpoint, "Chat completion endpoint URL");
    auto* o_model = app.add_option("--model", model, "Model name sent to the endpoint");
    auto* o_api_key_env =
        app.add_option("--api-key-env", api_key_env, "Env var holding the API key (empty: none)");
    auto* o_temperature = app.add_option("--temperature", temperature, "Sampling temperature");
    auto* o_max_tokens = app.add_option("--max-tokens", max_tokens, "Completion token cap");
    auto* o_timeout = app.add_option("--timeout-ms", timeout_ms, "Request timeout (ms)");
    auto* o_retries = app.add_option("--max-retries", max_retries, "Retries per request");
    auto* o_lambda = app.add_option("--lambda", lambda, "Cluster admission threshold");
    auto* o_min_prev =
        app.add_option("--min-prevalence", min_prevalence, "Smallest cluster to summarize");
    auto* o_cache = app.add_option("--cache-dir", cache_dir, "Completion cache directory");
    auto* o_out = app.add_option("--out", out_dir, "Output directory for artifacts");
    auto* o_scorer =
        app.add_option("--scorer", scorer, "Match scorer: lexical_f1, embedding_cosine, external");
    auto* o_scorer_endpoint =
        app.add_option("--scorer-endpoint", scorer_endpoint, "External scorer URL");
    auto* o_polarity =
        app.add_option("--polarity", polarity, "Evaluate one polarity only (positive/negative)");
    auto* o_parallel = app.add_option("--parallel", parallel, "Concurrent backend requests");
    auto* o_prompts = app.add_option("--prompts-dir", prompts_dir, "Prompt template directory");
    auto* o_lexicon = app.add_option("--lexicon-dir", lexicon_dir, "Sentiment word list directory");
    auto* o_mock = app.add_option("--mock-annotations", mock_annotations,
                                  "Canned replies file; replaces the live backend");
    auto* o_refs = app.add_option("--references", references, "Reference key points (JSONL)");
    auto* o_judgments =
        app.add_option("--judgments", judgments, "Pairwise system judgments (JSONL)");
    auto* o_matches = app.add_option("--matches", matches, "Comment-match annotations (CSV/JSONL)");
    auto* o_gold = app.add_option("--gold", gold, "Aspect-sentiment gold labels (JSONL)");
    auto* o_max_sent =
        app.add_option("--max-sentences", max_sentences, "Drop reviews longer than this");
    auto* o_min_rev =
        app.add_option("--min-reviews", min_reviews, "Drop entities with fewer reviews");
    auto* o_max_rev = app.add_option("--max-reviews", max_reviews, "Drop entities with more reviews");
    auto* o_top = app.add_option("--top-entities", top_entities, "Keep N entities per category");

    app.add_subcommand("ingest", "Load, filter, and sentence-split the corpus");
    app.add_subcommand("absa", "Extract aspect-sentiment pairs from comments");
    app.add_subcommand("cluster", "Group comments by similar aspect terms");
    app.add_subcommand("generate", "Write one key point per cluster");
    app.add_subcommand("evaluate", "Score summaries against references");
    app.add_subcommand("pipeline", "Run every stage in order");

    CLI11_PARSE(app, argc, argv);

    try {
        pakpa::PipelineConfig config;
        if (o_config->count() > 0) config = pakpa::load_pipeline_config(config_path);
        if (o_format->count() > 0) config.format = pakpa::corpus_format_from_string(format);
        if (o_corpus->count() > 0) config.corpus_path = corpus;
        if (o_vectors->count() > 0) config.vectors_path = vectors;
        if (o_endpoint->count() > 0) config.llm.endpoint_url = endpoint;
        if (o_model->count() > 0) config.llm.model_name = model;
        if (o_api_key_env->count() > 0) config.llm.api_key_env_var = api_key_env;
        if (o_temperature->count() > 0) config.llm.temperature = temperature;
        if (o_max_tokens->count() > 0) config.llm.max_tokens = max_tokens;
        if (o_timeout->count() > 0) config.llm.timeout = std::chrono::milliseconds(timeout_ms);
        if (o_retries->count() > 0) config.llm.max_retries = max_retries;
        if (o_lambda->count() > 0) config.lambda = lambda;
        if (o_min_prev->count() > 0) config.min_prevalence = min_prevalence;
        if (o_cache->count() > 0) config.cache_dir = cache_dir;
        if (o_out->count() > 0) config.output_dir = out_dir;
        if (o_scorer->count() > 0) config.scorer = pakpa::scorer_kind_from_string(scorer);
        if (o_scorer_endpoint->count() > 0) config.scorer_endpoint = scorer_endpoint;
        if (o_polarity->count() > 0) {
            config.polarity_filter = pakpa::polarity_from_string(polarity);
        }
        if (o_parallel->count() > 0) config.parallel = parallel;
        if (o_prompts->count() > 0) config.prompts_dir = prompts_dir;
        if (o_lexicon->count() > 0) config.lexicon_dir = lexicon_dir;
        if (o_mock->count() > 0) config.mock_annotations = mock_annotations;
        if (o_refs->count() > 0) config.references_path = references;
        if (o_judgments->count() > 0) config.judgments_path = judgments;
        if (o_matches->count() > 0) config.matches_path = matches;
        if (o_gold->count() > 0) config.gold_path = gold;
        if (o_max_sent->count() > 0) config.filter.max_sentences_per_review = max_sentences;
        if (o_min_rev->count() > 0) config.filter.min_reviews_per_entity = min_reviews;
        if (o_max_rev->count() > 0) config.filter.max_reviews_per_entity = max_reviews;
        if (o_top->count() > 0) config.filter.top_entities_per_category = top_entities;

        const pakpa::Stage stage =
            pakpa::stage_from_string(app.get_subcommands().front()->get_name());
        pakpa::run_stage(stage, config);
        return 0;
    } catch (const pakpa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
