#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pakpa/clustering.hpp"
#include "pakpa/core.hpp"
#include "pakpa/error.hpp"

namespace pakpa {

// ---------------------------------------------------------------------------
// Pairwise similarity scorers
// ---------------------------------------------------------------------------

enum class ScorerKind { LexicalF1, EmbeddingCosine, External };

std::string to_string(ScorerKind kind);
ScorerKind scorer_kind_from_string(const std::string& name);

/// Lowercased alphanumeric word tokens; punctuation separates and vanishes.
std::vector<std::string> tokenize_words(const std::string& text);

/// Token-level F1 between two texts (clipped counts). Two token-free texts
/// score 1, one token-free text scores 0.
double lexical_token_f1(const std::string& a, const std::string& b);

/// Pairwise text similarity in [0,1]. Three flavors: token F1, mean word
/// vector cosine (clamped at 0), and an external HTTP scorer for model-based
/// metrics (POST {"pairs":[{"candidate","reference"},...]} returning
/// {"scores":[...]}).
class SimilarityScorer {
  public:
    static SimilarityScorer lexical();
    static SimilarityScorer embedding(std::shared_ptr<const VectorStore> vectors);
    static SimilarityScorer external(std::string endpoint_url,
                                     std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

    ScorerKind kind() const { return kind_; }
    double score(const std::string& a, const std::string& b) const;

    /// All rows-by-cols scores; the external scorer batches them into one
    /// request.
    std::vector<std::vector<double>> score_matrix(const std::vector<std::string>& rows,
                                                  const std::vector<std::string>& cols) const;

  private:
    SimilarityScorer() = default;

    ScorerKind kind_ = ScorerKind::LexicalF1;
    std::shared_ptr<const VectorStore> vectors_;
    std::string endpoint_;
    std::chrono::milliseconds timeout_{30000};
};

// ---------------------------------------------------------------------------
// Set-level soft scores
// ---------------------------------------------------------------------------

struct SoftScores {
    double sp = 0.0;
    double sr = 0.0;
    double sf1 = 0.0;
};

/// Soft precision/recall/F1 between candidate and reference key point sets:
/// sP averages each candidate's best score against the references, sR
/// averages each reference's best score against the candidates, sF1 is their
/// harmonic mean (0 when both are 0). Throws EmptyInput on an empty side.
SoftScores soft_scores(const std::vector<std::string>& candidates,
                       const std::vector<std::string>& references,
                       const SimilarityScorer& scorer);

// ---------------------------------------------------------------------------
// ROUGE
// ---------------------------------------------------------------------------

enum class RougeVariant { Rouge1, Rouge2, RougeL };

/// ROUGE F1 (beta = 1) of one candidate against one reference: clipped
/// n-gram overlap for ROUGE-1/2, longest common subsequence for ROUGE-L.
/// Lowercase, no stemming; a side with no n-grams of the order scores 0.
double rouge_f1(const std::string& candidate, const std::string& reference, RougeVariant variant);

/// For each generated text, its best ROUGE F1 over the references, averaged
/// over the generated texts. Throws EmptyInput on an empty side.
double rouge_max_avg(const std::vector<std::string>& generated,
                     const std::vector<std::string>& references, RougeVariant variant);

// ---------------------------------------------------------------------------
// Bradley-Terry ranking
// ---------------------------------------------------------------------------

/// The seven key-point quality dimensions judged pairwise.
enum class QualityDimension {
    Coverage,
    Faithfulness,
    Redundancy,
    Validity,
    Sentiment,
    Informativeness,
    SingleAspect,
};

std::string to_string(QualityDimension dimension);
QualityDimension dimension_from_string(const std::string& name);

/// Win counts from pairwise comparisons along one dimension:
/// wins[i][j] = number of comparisons system i beat system j.
struct PairwiseJudgments {
    QualityDimension dimension = QualityDimension::Coverage;
    std::vector<std::string> systems;
    std::vector<std::vector<long>> wins;
};

/// Fits Bradley-Terry strengths by minorization-maximization and scales them
/// to sum to 100. Requires a connected comparison graph (DisconnectedGraph
/// otherwise) and at least one comparison between at least two systems
/// (NoComparisons otherwise). Returns one score per judgments.systems entry.
std::vector<double> bradley_terry(const PairwiseJudgments& judgments, int max_iters = 10000,
                                  double tol = 1e-8);

/// JSONL of {"dimension","winner","loser"} records (optional "count",
/// default 1), aggregated per dimension. Systems are indexed in first-seen
/// order per dimension.
std::map<QualityDimension, PairwiseJudgments> load_pairwise_judgments(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Annotator agreement and match aggregation
// ---------------------------------------------------------------------------

enum class MatchJudgment { Yes, No, Faulty };

std::string to_string(MatchJudgment judgment);
MatchJudgment judgment_from_string(const std::string& name);

struct MatchRecord {
    std::string comment_id;
    std::string kp_id;
    std::string annotator_id;
    MatchJudgment judgment = MatchJudgment::No;

    auto operator<=>(const MatchRecord&) const = default;
};

struct MatchAnnotationSet {
    std::vector<MatchRecord> records;
    std::optional<double> t_match;  // recorded for imported baselines, unused here
};

/// Cohen's kappa between two equal-length label sequences:
/// (p_o - p_e) / (1 - p_e). When chance agreement is total (p_e = 1), kappa
/// is 1 for identical sequences and 0 otherwise.
double cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct AnnotatorFilterResult {
    std::set<std::string> kept;
    std::map<std::string, double> excluded;  // annotator -> Annotator-kappa < 0
    std::map<std::string, double> kappa;     // every annotator whose kappa was computed
};

/// Reliability filter: an annotator sharing at least `min_shared` judgments
/// with at least `min_peers` other annotators gets an Annotator-kappa (mean
/// pairwise Cohen's kappa with those peers) and is excluded when it is
/// negative. Annotators below the sharing bar are kept as-is.
AnnotatorFilterResult annotator_kappa_filter(const std::vector<MatchRecord>& records,
                                             int min_shared = 50, int min_peers = 5);

/// Records whose annotator survived the filter.
std::vector<MatchRecord> filter_records(const std::vector<MatchRecord>& records,
                                        const AnnotatorFilterResult& filter);

struct MatchVerdict {
    std::string comment_id;
    std::string kp_id;
    int yes_votes = 0;
    int total_votes = 0;
    bool correct = false;

    auto operator<=>(const MatchVerdict&) const = default;
};

/// Majority aggregation per (comment, kp): correct iff yes votes reach 60% of
/// all votes, faulty votes counting in the denominator. Ordered by
/// (comment_id, kp_id). Throws NoVotes when no records remain.
std::vector<MatchVerdict> aggregate_matches(const std::vector<MatchRecord>& records);

struct CategoryPrecision {
    int correct = 0;
    int total = 0;
    double precision = 0.0;
};

struct QuantificationReport {
    std::map<Category, CategoryPrecision> per_category;
    double average = 0.0;  // unweighted mean over categories
};

/// Per-category precision of the aggregated verdicts plus the unweighted
/// macro average. Throws EmptyCategory when a category has no verdicts (or
/// no categories were given at all).
QuantificationReport quantification_precision(
    const std::map<Category, std::vector<MatchVerdict>>& by_category);

/// Match annotations from CSV (header comment_id,kp_id,annotator_id,judgment)
/// or JSONL records of the same fields, chosen by file extension. Duplicate
/// (comment, kp, annotator) triples throw DuplicateId.
MatchAnnotationSet load_match_records(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reference polarity splitting
// ---------------------------------------------------------------------------

using PolarityClassifier = std::function<Polarity(const std::string&)>;

/// Routes reference sentences into positive and negative buckets, dropping
/// the ones the classifier calls neutral.
std::pair<std::vector<std::string>, std::vector<std::string>> split_references_by_polarity(
    const std::vector<std::string>& sentences, const PolarityClassifier& classifier);

/// Word-list sentiment classifier: whichever polarity has more token hits
/// wins; ties and zero hits are neutral.
class LexiconClassifier {
  public:
    LexiconClassifier(std::set<std::string> positive_words, std::set<std::string> negative_words);

    Polarity operator()(const std::string& sentence) const;

  private:
    std::set<std::string> positive_;
    std::set<std::string> negative_;
};

/// Loads the word lists (one word per line, '#' comments and blanks skipped).
LexiconClassifier load_lexicon_classifier(const std::filesystem::path& positive_words,
                                          const std::filesystem::path& negative_words);

}  // namespace pakpa
