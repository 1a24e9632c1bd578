#pragma once

#include <string>
#include <vector>

#include "pakpa/core.hpp"
#include "pakpa/gateway.hpp"

namespace pakpa {

/// The quantified summary of one entity: key points ordered by polarity
/// section (positive, then negative), prevalence descending and cluster id
/// ascending within each section.
struct EntitySummary {
    EntityRef entity;
    std::vector<KeyPoint> key_points;
    std::string generated_at;
    std::string llm_model;
};

/// A cluster that produced no key point, and why (below the prevalence
/// floor, generation failure, duplicate text).
struct GenerationSkip {
    int cluster_id = 0;
    std::string reason;
};

/// Generates one key point per cluster of at least `min_prevalence` distinct
/// comments, `workers` clusters at a time. Generation failures skip the
/// cluster; clusters whose generated text duplicates another's (after
/// normalization) collapse to the higher-prevalence cluster. All skips land
/// in `skips` when given. `comments` is the entity's full comment set and
/// must be nonempty.
EntitySummary generate_keypoints(const std::vector<AspectCluster>& clusters,
                                 const std::vector<ReviewComment>& comments, LlmGateway& gateway,
                                 const PromptTemplate& tpl, int min_prevalence, int workers = 4,
                                 std::vector<GenerationSkip>* skips = nullptr);

/// The first k key points of one polarity by (prevalence desc, cluster_id asc).
std::vector<KeyPoint> select_top_k(const EntitySummary& summary, int k, Polarity polarity);

/// Fraction of the entity's comments matched by at least one key point.
double review_coverage(const EntitySummary& summary, const std::vector<ReviewComment>& comments);

/// Summary file shape: {"entity_id","model","key_points":[...]}.
nlohmann::json summary_to_json(const EntitySummary& summary);
EntitySummary summary_from_json(const nlohmann::json& j);

}  // namespace pakpa
