#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pakpa/core.hpp"

namespace pakpa {

/// Word-vector table loaded from a text file. Immutable after load and
/// shareable across threads.
struct VectorStore {
  int dimension = 0;
  std::map<std::string, std::vector<double>> table;  // lowercase token -> vector
  std::vector<std::string> warnings;                 // duplicate-token notes

  const std::vector<double>* find(const std::string& token) const {
    auto it = table.find(token);
    return it == table.end() ? nullptr : &it->second;
  }
};

/// Parses whitespace-separated "token v1 ... vd" lines. The first line fixes
/// the dimension; later lines with a different count raise DimensionMismatch.
/// Duplicate tokens keep the last occurrence and record a warning.
VectorStore load_vectors(const std::filesystem::path& path);

/// Mean of the in-vocabulary token vectors of a (normalized) term. A term
/// with no in-vocabulary token maps to the zero vector, so it can never be
/// merged on similarity it does not have.
std::vector<double> term_vector(const std::string& term, const VectorStore& store);

/// u.v / (|u||v|); 0 when either norm is 0.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

/// All aspect terms of one (entity, polarity), with per-term distinct-comment
/// frequency and the comments mentioning each term.
struct AspectPool {
  EntityRef entity;
  Polarity polarity = Polarity::Positive;
  std::map<std::string, int> term_freq;
  std::map<std::string, std::set<std::string>> term_comments;

  bool empty() const { return term_freq.empty(); }
};

struct ClusteringParams {
  double lambda_threshold = 0.55;

  void check() const;
};

struct EntityPools {
  AspectPool positive;
  AspectPool negative;
};

/// Drops neutral pairs, normalizes terms, and counts each (comment, term,
/// polarity) once per comment. Annotations must reference known comments.
std::map<EntityRef, EntityPools> build_pools(
    const std::vector<AspectAnnotation>& annotations,
    const std::vector<ReviewComment>& comments);

/// Greedy aspect clustering: terms ranked by frequency descending (ties by
/// term ascending) are assigned to the existing cluster with the highest mean
/// cosine similarity to its terms when that mean exceeds the threshold,
/// otherwise they open a new cluster. Earliest-created cluster wins mean
/// ties. Output is ordered by prevalence descending, then cluster_id.
std::vector<AspectCluster> cluster_pool(const AspectPool& pool, const VectorStore& store,
                                        const ClusteringParams& params);

/// Inverse index: comment_id -> ids of clusters containing any of its terms.
std::map<std::string, std::set<int>> clusters_to_memberships(
    const std::vector<AspectCluster>& clusters);

}  // namespace pakpa
