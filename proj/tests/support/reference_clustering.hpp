#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

// A second, deliberately naive implementation of the greedy aspect-grouping
// procedure, kept free of library code so tests can cross-check two unrelated
// codepaths against each other.
namespace oracle {

struct Cluster {
    int id = 0;
    std::vector<std::string> terms;  // admission order
    std::set<std::string> comments;
    int prevalence() const { return static_cast<int>(comments.size()); }
};

using Vocab = std::map<std::string, std::vector<double>>;

/// Mean of the in-vocabulary whitespace tokens of `term`; zero vector when
/// none are known.
std::vector<double> embed(const std::string& term, const Vocab& vocab, int dim);

/// Plain cosine; zero when either argument has zero norm.
double cos_sim(const std::vector<double>& a, const std::vector<double>& b);

/// The greedy grouping, transcribed step by step:
///   1. order distinct terms by count descending, ties alphabetically;
///   2. walk the ordered terms, scoring each existing group by the average
///      cosine between the candidate and every term already in the group;
///   3. join the best-scoring group (earliest one on ties) when its average
///      exceeds lambda, otherwise open a new group;
///   4. each group's comments are the union over its terms; the result is
///      ordered by comment count descending, then by group id.
std::vector<Cluster> greedy_clusters(
    const std::map<std::string, int>& term_freq,
    const std::map<std::string, std::set<std::string>>& term_comments, const Vocab& vocab,
    int dim, double lambda);

}  // namespace oracle
