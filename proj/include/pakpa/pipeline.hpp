#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pakpa/absa.hpp"
#include "pakpa/clustering.hpp"
#include "pakpa/evaluation.hpp"
#include "pakpa/gateway.hpp"
#include "pakpa/ingestion.hpp"
#include "pakpa/kp_generation.hpp"

namespace pakpa {

/// Everything a stage run needs, resolvable from a config file, flags, or
/// both (flags win).
struct PipelineConfig {
    CorpusFormat format = CorpusFormat::Yelp;
    std::filesystem::path corpus_path;
    std::filesystem::path vectors_path;
    LlmConfig llm;
    double lambda = 0.55;
    int min_prevalence = 15;
    std::filesystem::path cache_dir = ".pakpa-cache";
    std::filesystem::path output_dir = "out";
    ScorerKind scorer = ScorerKind::LexicalF1;
    std::string scorer_endpoint;
    std::optional<Polarity> polarity_filter;  // evaluate only this polarity
    int parallel = 4;
    std::filesystem::path prompts_dir = "assets/prompts";
    std::filesystem::path lexicon_dir = "assets/lexicon";
    std::filesystem::path mock_annotations;  // set: replies come from this table, no network
    std::filesystem::path references_path;
    std::filesystem::path judgments_path;
    std::filesystem::path matches_path;
    std::filesystem::path gold_path;
    CorpusFilter filter;

    /// Range checks on every numeric knob. Throws ConfigError.
    void check() const;
};

/// Reads a JSON config file whose keys mirror the CLI flags. Unknown keys
/// throw ConfigError so typos cannot silently fall back to defaults.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

enum class Stage { Ingest, Absa, Cluster, Generate, Evaluate, Pipeline };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);

/// Runs one stage (or all of them for Stage::Pipeline; evaluate joins the
/// ride when a references path is configured). Outputs are written atomically
/// under config.output_dir; fatal problems throw Error. Stages read their
/// inputs from the previous stage's artifacts and throw MissingArtifact when
/// those have not been produced yet.
void run_stage(Stage stage, const PipelineConfig& config);

/// The gateway a stage talks through: a mock backend when
/// config.mock_annotations is set, HTTP otherwise.
LlmGateway make_gateway(const PipelineConfig& config);

/// Table-style text report of one entity's summary: each key point with its
/// prevalence and the first two matching comments by comment id.
std::string render_report(const EntitySummary& summary,
                          const std::map<std::string, std::string>& comment_texts);

}  // namespace pakpa
