#include "pakpa/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pakpa/jsonl.hpp"

using nlohmann::json;

namespace pakpa {

// ---------------------------------------------------------------------------
// Scorers
// ---------------------------------------------------------------------------

std::string to_string(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::LexicalF1: return "lexical_f1";
        case ScorerKind::EmbeddingCosine: return "embedding_cosine";
        case ScorerKind::External: return "external";
    }
    throw Error(ErrorCode::ConfigError, "unhandled scorer kind");
}

ScorerKind scorer_kind_from_string(const std::string& name) {
    if (name == "lexical_f1") return ScorerKind::LexicalF1;
    if (name == "embedding_cosine") return ScorerKind::EmbeddingCosine;
    if (name == "external") return ScorerKind::External;
    throw Error(ErrorCode::ConfigError, "unknown scorer '" + name + "'");
}

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (c >= 0x80 || std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

std::map<std::string, int> token_counts(const std::vector<std::string>& tokens) {
    std::map<std::string, int> counts;
    for (const std::string& token : tokens) ++counts[token];
    return counts;
}

long clipped_overlap(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
    long overlap = 0;
    for (const auto& [token, count] : a) {
        const auto found = b.find(token);
        if (found != b.end()) overlap += std::min(count, found->second);
    }
    return overlap;
}

double harmonic_f1(double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

double lexical_token_f1(const std::string& a, const std::string& b) {
    const auto tokens_a = tokenize_words(a);
    const auto tokens_b = tokenize_words(b);
    if (tokens_a.empty() && tokens_b.empty()) return 1.0;
    if (tokens_a.empty() || tokens_b.empty()) return 0.0;
    const long overlap = clipped_overlap(token_counts(tokens_a), token_counts(tokens_b));
    const double precision = static_cast<double>(overlap) / static_cast<double>(tokens_a.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(tokens_b.size());
    return harmonic_f1(precision, recall);
}

SimilarityScorer SimilarityScorer::lexical() {
    SimilarityScorer scorer;
    scorer.kind_ = ScorerKind::LexicalF1;
    return scorer;
}

SimilarityScorer SimilarityScorer::embedding(std::shared_ptr<const VectorStore> vectors) {
    if (vectors == nullptr) {
        throw Error(ErrorCode::ConfigError, "embedding scorer needs a vector store");
    }
    SimilarityScorer scorer;
    scorer.kind_ = ScorerKind::EmbeddingCosine;
    scorer.vectors_ = std::move(vectors);
    return scorer;
}

SimilarityScorer SimilarityScorer::external(std::string endpoint_url,
                                            std::chrono::milliseconds timeout) {
    if (endpoint_url.find("://") == std::string::npos) {
        throw Error(ErrorCode::ConfigError,
                    "external scorer endpoint must be a URL, got '" + endpoint_url + "'");
    }
    SimilarityScorer scorer;
    scorer.kind_ = ScorerKind::External;
    scorer.endpoint_ = std::move(endpoint_url);
    scorer.timeout_ = timeout;
    return scorer;
}

namespace {

double clamp01(double value) { return std::min(1.0, std::max(0.0, value)); }

std::vector<double> external_scores(const std::string& endpoint,
                                    std::chrono::milliseconds timeout,
                                    const std::vector<std::pair<std::string, std::string>>& pairs) {
    const auto scheme_end = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme_end + 3);
    const std::string base =
        path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    json body;
    body["pairs"] = json::array();
    for (const auto& [candidate, reference] : pairs) {
        body["pairs"].push_back(json{{"candidate", candidate}, {"reference", reference}});
    }

    httplib::Client client(base);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto result = client.Post(path, body.dump(), "application/json");
    if (!result) {
        throw Error(ErrorCode::NetworkError, "transport failure talking to scorer " + base + ": " +
                                                 httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
        throw Error(ErrorCode::HttpError,
                    "status " + std::to_string(result->status) + " from scorer " + base,
                    result->status);
    }
    const json parsed = json::parse(result->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("scores") || !parsed["scores"].is_array()) {
        throw Error(ErrorCode::MalformedJson, "scorer response lacks a 'scores' list");
    }
    std::vector<double> scores;
    for (const json& value : parsed["scores"]) {
        if (!value.is_number()) {
            throw Error(ErrorCode::MalformedJson, "scorer returned a non-numeric score");
        }
        scores.push_back(clamp01(value.get<double>()));
    }
    if (scores.size() != pairs.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "scorer returned " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(pairs.size()) + " pairs");
    }
    return scores;
}

}  // namespace

double SimilarityScorer::score(const std::string& a, const std::string& b) const {
    switch (kind_) {
        case ScorerKind::LexicalF1:
            return lexical_token_f1(a, b);
        case ScorerKind::EmbeddingCosine: {
            std::string joined_a;
            for (const std::string& token : tokenize_words(a)) {
                if (!joined_a.empty()) joined_a += ' ';
                joined_a += token;
            }
            std::string joined_b;
            for (const std::string& token : tokenize_words(b)) {
                if (!joined_b.empty()) joined_b += ' ';
                joined_b += token;
            }
            return clamp01(cosine(term_vector(joined_a, *vectors_), term_vector(joined_b, *vectors_)));
        }
        case ScorerKind::External:
            return external_scores(endpoint_, timeout_, {{a, b}}).front();
    }
    throw Error(ErrorCode::ConfigError, "unhandled scorer kind");
}

std::vector<std::vector<double>> SimilarityScorer::score_matrix(
    const std::vector<std::string>& rows, const std::vector<std::string>& cols) const {
    std::vector<std::vector<double>> matrix(rows.size(), std::vector<double>(cols.size(), 0.0));
    if (kind_ == ScorerKind::External) {
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(rows.size() * cols.size());
        for (const std::string& row : rows) {
            for (const std::string& col : cols) pairs.emplace_back(row, col);
        }
        const auto scores = external_scores(endpoint_, timeout_, pairs);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) {
                matrix[i][j] = scores[i * cols.size() + j];
            }
        }
        return matrix;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            matrix[i][j] = score(rows[i], cols[j]);
        }
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Soft scores
// ---------------------------------------------------------------------------

SoftScores soft_scores(const std::vector<std::string>& candidates,
                       const std::vector<std::string>& references,
                       const SimilarityScorer& scorer) {
    if (candidates.empty()) throw Error(ErrorCode::EmptyInput, "no candidate key points");
    if (references.empty()) throw Error(ErrorCode::EmptyInput, "no reference key points");

    const auto matrix = scorer.score_matrix(candidates, references);

    SoftScores scores;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        scores.sp += *std::max_element(matrix[i].begin(), matrix[i].end());
    }
    scores.sp /= static_cast<double>(candidates.size());
    for (std::size_t j = 0; j < references.size(); ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            best = std::max(best, matrix[i][j]);
        }
        scores.sr += best;
    }
    scores.sr /= static_cast<double>(references.size());
    scores.sf1 = harmonic_f1(scores.sp, scores.sr);
    return scores;
}

// ---------------------------------------------------------------------------
// ROUGE
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::map<std::string, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t k = 1; k < n; ++k) {
            gram += '\x1f';
            gram += tokens[i + k];
        }
        ++counts[gram];
    }
    return counts;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    return dp[a.size()][b.size()];
}

}  // namespace

double rouge_f1(const std::string& candidate, const std::string& reference, RougeVariant variant) {
    const auto cand_tokens = tokenize_words(candidate);
    const auto ref_tokens = tokenize_words(reference);

    if (variant == RougeVariant::RougeL) {
        if (cand_tokens.empty() || ref_tokens.empty()) return 0.0;
        const double lcs = static_cast<double>(lcs_length(cand_tokens, ref_tokens));
        return harmonic_f1(lcs / static_cast<double>(cand_tokens.size()),
                           lcs / static_cast<double>(ref_tokens.size()));
    }

    const std::size_t n = variant == RougeVariant::Rouge1 ? 1 : 2;
    const auto cand_grams = ngram_counts(cand_tokens, n);
    const auto ref_grams = ngram_counts(ref_tokens, n);
    long cand_total = 0;
    for (const auto& [gram, count] : cand_grams) cand_total += count;
    long ref_total = 0;
    for (const auto& [gram, count] : ref_grams) ref_total += count;
    if (cand_total == 0 || ref_total == 0) return 0.0;

    const long overlap = clipped_overlap(cand_grams, ref_grams);
    return harmonic_f1(static_cast<double>(overlap) / static_cast<double>(cand_total),
                       static_cast<double>(overlap) / static_cast<double>(ref_total));
}

double rouge_max_avg(const std::vector<std::string>& generated,
                     const std::vector<std::string>& references, RougeVariant variant) {
    if (generated.empty()) throw Error(ErrorCode::EmptyInput, "no generated texts");
    if (references.empty()) throw Error(ErrorCode::EmptyInput, "no reference texts");
    double sum = 0.0;
    for (const std::string& reference : references) {
        double best = 0.0;
        for (const std::string& text : generated) {
            best = std::max(best, rouge_f1(text, reference, variant));
        }
        sum += best;
    }
    return sum / static_cast<double>(references.size());
}

// ---------------------------------------------------------------------------
// Bradley-Terry
// ---------------------------------------------------------------------------

std::string to_string(QualityDimension dimension) {
    switch (dimension) {
        case QualityDimension::Coverage: return "coverage";
        case QualityDimension::Faithfulness: return "faithfulness";
        case QualityDimension::Redundancy: return "redundancy";
        case QualityDimension::Validity: return "validity";
        case QualityDimension::Sentiment: return "sentiment";
        case QualityDimension::Informativeness: return "informativeness";
        case QualityDimension::SingleAspect: return "single_aspect";
    }
    throw Error(ErrorCode::ConfigError, "unhandled quality dimension");
}

QualityDimension dimension_from_string(const std::string& name) {
    if (name == "coverage") return QualityDimension::Coverage;
    if (name == "faithfulness") return QualityDimension::Faithfulness;
    if (name == "redundancy") return QualityDimension::Redundancy;
    if (name == "validity") return QualityDimension::Validity;
    if (name == "sentiment") return QualityDimension::Sentiment;
    if (name == "informativeness") return QualityDimension::Informativeness;
    if (name == "single_aspect") return QualityDimension::SingleAspect;
    throw Error(ErrorCode::ConfigError, "unknown quality dimension '" + name + "'");
}

std::vector<double> bradley_terry(const PairwiseJudgments& judgments, int max_iters, double tol) {
    const std::size_t n = judgments.systems.size();
    if (judgments.wins.size() != n) {
        throw Error(ErrorCode::ConfigError, "win matrix rows do not match the system count");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (judgments.wins[i].size() != n) {
            throw Error(ErrorCode::ConfigError, "win matrix row " + std::to_string(i) +
                                                    " does not match the system count");
        }
        if (judgments.wins[i][i] != 0) {
            throw Error(ErrorCode::ConfigError,
                        "system '" + judgments.systems[i] + "' has self-comparisons");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (judgments.wins[i][j] < 0) {
                throw Error(ErrorCode::ConfigError, "negative win count");
            }
        }
    }
    if (n < 2) throw Error(ErrorCode::NoComparisons, "need at least two systems");

    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) total += judgments.wins[i][j];
    }
    if (total == 0) {
        throw Error(ErrorCode::NoComparisons,
                    "no comparisons for dimension " + to_string(judgments.dimension));
    }

    // Comparison graph connectivity: every system must be reachable through
    // compared pairs, or relative strengths are unidentifiable.
    std::vector<bool> reached(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    reached[0] = true;
    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (std::size_t j = 0; j < n; ++j) {
            if (!reached[j] && judgments.wins[i][j] + judgments.wins[j][i] > 0) {
                reached[j] = true;
                frontier.push(j);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) {
            throw Error(ErrorCode::DisconnectedGraph,
                        "system '" + judgments.systems[i] + "' shares no comparisons with '" +
                            judgments.systems[0] + "'");
        }
    }

    std::vector<double> total_wins(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) total_wins[i] += static_cast<double>(judgments.wins[i][j]);
    }

    // Minorization-maximization: pi_i <- W_i / sum_j n_ij / (pi_i + pi_j),
    // renormalized to sum 100 each round for a scale-free convergence test.
    std::vector<double> pi(n, 100.0 / static_cast<double>(n));
    std::vector<double> next(n, 0.0);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double denominator = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double pair_count =
                    static_cast<double>(judgments.wins[i][j] + judgments.wins[j][i]);
                if (pair_count > 0.0) denominator += pair_count / (pi[i] + pi[j]);
            }
            next[i] = denominator > 0.0 ? total_wins[i] / denominator : 0.0;
        }
        const double sum = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& value : next) value *= 100.0 / sum;

        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            change = std::max(change, std::abs(next[i] - pi[i]) / std::max(pi[i], 1e-12));
        }
        pi = next;
        if (change < tol) break;
    }
    const double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& value : pi) value *= 100.0 / sum;
    return pi;
}

std::map<QualityDimension, PairwiseJudgments> load_pairwise_judgments(
    const std::filesystem::path& path) {
    std::map<QualityDimension, PairwiseJudgments> by_dimension;
    std::map<QualityDimension, std::map<std::string, std::size_t>> system_index;
    std::size_t line = 0;
    for (const json& record : read_jsonl(path)) {
        ++line;
        const std::string where = path.filename().string() + " record " + std::to_string(line);
        for (const char* key : {"dimension", "winner", "loser"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                throw Error(ErrorCode::MissingField, std::string("'") + key + "' in " + where);
            }
        }
        const QualityDimension dimension =
            dimension_from_string(record["dimension"].get<std::string>());
        const std::string winner = record["winner"].get<std::string>();
        const std::string loser = record["loser"].get<std::string>();
        if (winner == loser) {
            throw Error(ErrorCode::ParseError, "winner equals loser in " + where);
        }
        long count = 1;
        if (record.contains("count")) {
            if (!record["count"].is_number_integer() || record["count"].get<long>() < 1) {
                throw Error(ErrorCode::ParseError, "'count' must be a positive integer in " + where);
            }
            count = record["count"].get<long>();
        }

        PairwiseJudgments& judgments = by_dimension[dimension];
        judgments.dimension = dimension;
        auto& index = system_index[dimension];
        for (const std::string& system : {winner, loser}) {
            if (index.emplace(system, judgments.systems.size()).second) {
                judgments.systems.push_back(system);
                for (auto& row : judgments.wins) row.push_back(0);
                judgments.wins.emplace_back(judgments.systems.size(), 0);
            }
        }
        judgments.wins[index.at(winner)][index.at(loser)] += count;
    }
    return by_dimension;
}

// ---------------------------------------------------------------------------
// Agreement and aggregation
// ---------------------------------------------------------------------------

std::string to_string(MatchJudgment judgment) {
    switch (judgment) {
        case MatchJudgment::Yes: return "yes";
        case MatchJudgment::No: return "no";
        case MatchJudgment::Faulty: return "faulty";
    }
    throw Error(ErrorCode::ConfigError, "unhandled judgment");
}

MatchJudgment judgment_from_string(const std::string& name) {
    const std::string folded = lowercase(trim(name));
    if (folded == "yes") return MatchJudgment::Yes;
    if (folded == "no") return MatchJudgment::No;
    if (folded == "faulty") return MatchJudgment::Faulty;
    throw Error(ErrorCode::ConfigError, "unknown judgment '" + name + "'");
}

double cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(a.size()) + " labels vs " +
                                                   std::to_string(b.size()) + " labels");
    }
    if (a.empty()) throw Error(ErrorCode::LengthMismatch, "empty label sequences");

    const double n = static_cast<double>(a.size());
    double agreed = 0.0;
    std::map<std::string, int> counts_a;
    std::map<std::string, int> counts_b;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agreed;
        ++counts_a[a[i]];
        ++counts_b[b[i]];
    }
    const double observed = agreed / n;
    double expected = 0.0;
    for (const auto& [label, count] : counts_a) {
        const auto found = counts_b.find(label);
        if (found != counts_b.end()) {
            expected += (count / n) * (found->second / n);
        }
    }
    if (expected >= 1.0) return observed >= 1.0 ? 1.0 : 0.0;
    return (observed - expected) / (1.0 - expected);
}

AnnotatorFilterResult annotator_kappa_filter(const std::vector<MatchRecord>& records,
                                             int min_shared, int min_peers) {
    using ItemKey = std::pair<std::string, std::string>;
    std::map<std::string, std::map<ItemKey, MatchJudgment>> by_annotator;
    for (const MatchRecord& record : records) {
        by_annotator[record.annotator_id].emplace(ItemKey{record.comment_id, record.kp_id},
                                                  record.judgment);
    }

    AnnotatorFilterResult result;
    for (const auto& [annotator, items] : by_annotator) {
        std::vector<double> peer_kappas;
        for (const auto& [peer, peer_items] : by_annotator) {
            if (peer == annotator) continue;
            std::vector<std::string> labels_a;
            std::vector<std::string> labels_b;
            for (const auto& [item, judgment] : items) {
                const auto shared = peer_items.find(item);
                if (shared != peer_items.end()) {
                    labels_a.push_back(to_string(judgment));
                    labels_b.push_back(to_string(shared->second));
                }
            }
            if (static_cast<int>(labels_a.size()) >= min_shared) {
                peer_kappas.push_back(cohens_kappa(labels_a, labels_b));
            }
        }
        if (static_cast<int>(peer_kappas.size()) < min_peers) {
            result.kept.insert(annotator);  // too little overlap to judge reliability
            continue;
        }
        const double kappa = std::accumulate(peer_kappas.begin(), peer_kappas.end(), 0.0) /
                             static_cast<double>(peer_kappas.size());
        result.kappa[annotator] = kappa;
        if (kappa < 0.0) {
            result.excluded[annotator] = kappa;
        } else {
            result.kept.insert(annotator);
        }
    }
    return result;
}

std::vector<MatchRecord> filter_records(const std::vector<MatchRecord>& records,
                                        const AnnotatorFilterResult& filter) {
    std::vector<MatchRecord> kept;
    for (const MatchRecord& record : records) {
        if (filter.kept.count(record.annotator_id) > 0) kept.push_back(record);
    }
    return kept;
}

std::vector<MatchVerdict> aggregate_matches(const std::vector<MatchRecord>& records) {
    if (records.empty()) {
        throw Error(ErrorCode::NoVotes, "no judgments left to aggregate");
    }
    std::map<std::pair<std::string, std::string>, MatchVerdict> verdicts;
    for (const MatchRecord& record : records) {
        MatchVerdict& verdict = verdicts[{record.comment_id, record.kp_id}];
        verdict.comment_id = record.comment_id;
        verdict.kp_id = record.kp_id;
        ++verdict.total_votes;
        if (record.judgment == MatchJudgment::Yes) ++verdict.yes_votes;
    }
    std::vector<MatchVerdict> out;
    out.reserve(verdicts.size());
    for (auto& [key, verdict] : verdicts) {
        (void)key;
        // yes/total >= 0.60, compared in integers to dodge rounding.
        verdict.correct = verdict.yes_votes * 5 >= verdict.total_votes * 3;
        out.push_back(std::move(verdict));
    }
    return out;
}

QuantificationReport quantification_precision(
    const std::map<Category, std::vector<MatchVerdict>>& by_category) {
    if (by_category.empty()) {
        throw Error(ErrorCode::EmptyCategory, "no categories to evaluate");
    }
    QuantificationReport report;
    double sum = 0.0;
    for (const auto& [category, verdicts] : by_category) {
        if (verdicts.empty()) {
            throw Error(ErrorCode::EmptyCategory, "category '" + to_string(category) +
                                                      "' has no verdicts");
        }
        CategoryPrecision precision;
        precision.total = static_cast<int>(verdicts.size());
        for (const MatchVerdict& verdict : verdicts) {
            if (verdict.correct) ++precision.correct;
        }
        precision.precision =
            static_cast<double>(precision.correct) / static_cast<double>(precision.total);
        sum += precision.precision;
        report.per_category.emplace(category, precision);
    }
    report.average = sum / static_cast<double>(report.per_category.size());
    return report;
}

namespace {

MatchRecord record_from_fields(const std::string& comment_id, const std::string& kp_id,
                               const std::string& annotator_id, const std::string& judgment,
                               const std::string& where) {
    if (comment_id.empty() || kp_id.empty() || annotator_id.empty()) {
        throw Error(ErrorCode::ParseError, "empty id field in " + where);
    }
    return {comment_id, kp_id, annotator_id, judgment_from_string(judgment)};
}

}  // namespace

MatchAnnotationSet load_match_records(const std::filesystem::path& path) {
    MatchAnnotationSet set;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    auto add = [&](MatchRecord record, const std::string& where) {
        if (!seen.insert({record.comment_id, record.kp_id, record.annotator_id}).second) {
            throw Error(ErrorCode::DuplicateId, "annotator '" + record.annotator_id +
                                                    "' judged (" + record.comment_id + ", " +
                                                    record.kp_id + ") twice; " + where);
        }
        set.records.push_back(std::move(record));
    };

    if (path.extension() == ".csv") {
        std::istringstream stream(read_text(path));
        std::string header;
        if (!std::getline(stream, header)) {
            throw Error(ErrorCode::ParseError, path.filename().string() + " is empty");
        }
        if (trim(header) != "comment_id,kp_id,annotator_id,judgment") {
            throw Error(ErrorCode::ParseError,
                        path.filename().string() +
                            " must start with header comment_id,kp_id,annotator_id,judgment");
        }
        std::string row;
        std::size_t line = 1;
        while (std::getline(stream, row)) {
            ++line;
            if (trim(row).empty()) continue;
            const std::string where =
                path.filename().string() + " line " + std::to_string(line);
            std::vector<std::string> fields;
            std::string field;
            std::istringstream row_stream(row);
            while (std::getline(row_stream, field, ',')) fields.push_back(trim(field));
            if (fields.size() != 4) {
                throw Error(ErrorCode::ParseError, "expected 4 fields in " + where);
            }
            add(record_from_fields(fields[0], fields[1], fields[2], fields[3], where), where);
        }
        return set;
    }

    std::size_t line = 0;
    for (const json& record : read_jsonl(path)) {
        ++line;
        const std::string where = path.filename().string() + " record " + std::to_string(line);
        for (const char* key : {"comment_id", "kp_id", "annotator_id", "judgment"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                throw Error(ErrorCode::MissingField, std::string("'") + key + "' in " + where);
            }
        }
        add(record_from_fields(record["comment_id"].get<std::string>(),
                               record["kp_id"].get<std::string>(),
                               record["annotator_id"].get<std::string>(),
                               record["judgment"].get<std::string>(), where),
            where);
    }
    return set;
}

// ---------------------------------------------------------------------------
// Reference polarity splitting
// ---------------------------------------------------------------------------

std::pair<std::vector<std::string>, std::vector<std::string>> split_references_by_polarity(
    const std::vector<std::string>& sentences, const PolarityClassifier& classifier) {
    std::pair<std::vector<std::string>, std::vector<std::string>> buckets;
    for (const std::string& sentence : sentences) {
        switch (classifier(sentence)) {
            case Polarity::Positive: buckets.first.push_back(sentence); break;
            case Polarity::Negative: buckets.second.push_back(sentence); break;
            case Polarity::Neutral: break;
        }
    }
    return buckets;
}

LexiconClassifier::LexiconClassifier(std::set<std::string> positive_words,
                                     std::set<std::string> negative_words)
    : positive_(std::move(positive_words)), negative_(std::move(negative_words)) {}

Polarity LexiconClassifier::operator()(const std::string& sentence) const {
    int positive_hits = 0;
    int negative_hits = 0;
    for (const std::string& token : tokenize_words(sentence)) {
        if (positive_.count(token) > 0) ++positive_hits;
        if (negative_.count(token) > 0) ++negative_hits;
    }
    if (positive_hits > negative_hits) return Polarity::Positive;
    if (negative_hits > positive_hits) return Polarity::Negative;
    return Polarity::Neutral;
}

namespace {

std::set<std::string> load_word_list(const std::filesystem::path& path) {
    std::set<std::string> words;
    std::istringstream stream(read_text(path));
    std::string line;
    while (std::getline(stream, line)) {
        const std::string word = trim(line);
        if (word.empty() || word.front() == '#') continue;
        words.insert(lowercase(word));
    }
    return words;
}

}  // namespace

LexiconClassifier load_lexicon_classifier(const std::filesystem::path& positive_words,
                                          const std::filesystem::path& negative_words) {
    return {load_word_list(positive_words), load_word_list(negative_words)};
}

}  // namespace pakpa
