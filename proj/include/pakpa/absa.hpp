#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pakpa/core.hpp"
#include "pakpa/gateway.hpp"

namespace pakpa {

/// One comment whose annotation failed, with the error that killed it.
struct AbsaFailure {
    std::string comment_id;
    std::string error;
};

/// Aspect-sentiment analysis of one entity's comments. Every input comment
/// shows up exactly once: in `annotations` when its reply parsed, in
/// `failures` otherwise.
struct AbsaRun {
    EntityRef entity;
    std::vector<AspectAnnotation> annotations;
    std::vector<AbsaFailure> failures;
};

/// Hand-labeled (aspect, sentiment) pairs keyed by comment id.
struct AbsaGold {
    std::map<std::string, std::vector<AspectPair>> by_comment;
};

struct F1Score {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Annotates every comment through the gateway, `workers` comments at a
/// time. Comments must be nonempty and share one entity. Per-comment
/// failures (network, malformed replies) are recorded, never fatal; both
/// result lists keep the input order.
AbsaRun annotate_corpus(const std::vector<ReviewComment>& comments, LlmGateway& gateway,
                        const PromptTemplate& tpl, int workers = 4);

/// Reads gold labels: JSONL {"comment_id","pairs":[...],"gold":true}.
/// Aspect terms are normalized on load.
AbsaGold load_absa_gold(const std::filesystem::path& path);

/// Exact-match aspect-term extraction micro-F1: a predicted term is a true
/// positive iff it string-equals (after normalization) a gold term of the
/// same comment. Pred and gold must cover the same comment ids.
F1Score score_ae(const AbsaRun& pred, const AbsaGold& gold);

/// Sentiment classification micro-F1 over gold aspect terms: a gold term the
/// prediction misses counts as an error, a matched term scores by polarity
/// agreement. Extra predicted terms are ignored.
F1Score score_asc(const AbsaRun& pred, const AbsaGold& gold);

}  // namespace pakpa
