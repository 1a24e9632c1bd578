#include "pakpa/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pakpa {

VectorStore load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  VectorStore store;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;  // blank line
    std::vector<double> vec;
    std::string value;
    while (fields >> value) {
      try {
        size_t used = 0;
        double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        vec.push_back(parsed);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_number) + ": bad value '" + value + "'");
      }
    }
    if (store.dimension == 0) {
      if (vec.empty()) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_number) + ": no vector values");
      }
      store.dimension = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != store.dimension) {
      throw Error(ErrorCode::DimensionMismatch, "line " + std::to_string(line_number));
    }
    std::string key = lowercase(token);
    if (store.table.count(key)) {
      store.warnings.push_back("duplicate token '" + key + "' at line " +
                               std::to_string(line_number) + ", last occurrence wins");
    }
    store.table[key] = std::move(vec);
  }
  return store;
}

std::vector<double> term_vector(const std::string& term, const VectorStore& store) {
  std::vector<double> sum(static_cast<size_t>(store.dimension), 0.0);
  int hits = 0;
  std::istringstream tokens(term);
  std::string token;
  while (tokens >> token) {
    const std::vector<double>* vec = store.find(token);
    if (!vec) continue;
    for (size_t d = 0; d < sum.size(); ++d) sum[d] += (*vec)[d];
    ++hits;
  }
  if (hits > 1) {
    for (double& component : sum) component /= hits;
  }
  return sum;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t d = 0; d < u.size(); ++d) {
    dot += u[d] * v[d];
    nu += u[d] * u[d];
    nv += v[d] * v[d];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

void ClusteringParams::check() const {
  if (!(lambda_threshold > 0.0 && lambda_threshold < 1.0)) {
    throw Error(ErrorCode::ConfigError, "lambda_threshold must be in (0,1)");
  }
}

std::map<EntityRef, EntityPools> build_pools(
    const std::vector<AspectAnnotation>& annotations,
    const std::vector<ReviewComment>& comments) {
  std::map<std::string, const ReviewComment*> by_id;
  std::map<EntityRef, EntityPools> pools;
  for (const auto& comment : comments) {
    by_id[comment.comment_id] = &comment;
    auto& entry = pools[comment.entity];
    entry.positive.entity = comment.entity;
    entry.positive.polarity = Polarity::Positive;
    entry.negative.entity = comment.entity;
    entry.negative.polarity = Polarity::Negative;
  }

  for (const auto& annotation : annotations) {
    auto it = by_id.find(annotation.comment_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::UnknownComment, annotation.comment_id);
    }
    const ReviewComment& comment = *it->second;
    EntityPools& entry = pools[comment.entity];
    for (const auto& pair : annotation.pairs) {
      if (pair.sentiment == Polarity::Neutral) continue;  // neutral is dropped here
      std::string term = normalize_aspect_term(pair.aspect);
      if (term.empty()) continue;
      AspectPool& pool =
          pair.sentiment == Polarity::Positive ? entry.positive : entry.negative;
      // Count each (comment, term) once per comment.
      if (pool.term_comments[term].insert(annotation.comment_id).second) {
        pool.term_freq[term]++;
      }
    }
  }
  return pools;
}

std::vector<AspectCluster> cluster_pool(const AspectPool& pool, const VectorStore& store,
                                        const ClusteringParams& params) {
  params.check();

  // Rank: frequency descending, then term ascending.
  std::vector<std::pair<std::string, int>> ranked(pool.term_freq.begin(),
                                                  pool.term_freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::map<std::string, std::vector<double>> vectors;
  for (const auto& [term, freq] : ranked) {
    vectors[term] = term_vector(term, store);
  }

  std::vector<AspectCluster> clusters;
  for (const auto& [term, freq] : ranked) {
    const std::vector<double>& candidate = vectors[term];
    int best_index = -1;
    double best_mean = 0.0;
    for (size_t c = 0; c < clusters.size(); ++c) {
      double total = 0.0;
      for (const auto& member : clusters[c].terms) {
        total += cosine(candidate, vectors[member.term]);
      }
      double mean = total / static_cast<double>(clusters[c].terms.size());
      if (best_index < 0 || mean > best_mean) {  // earliest cluster wins ties
        best_index = static_cast<int>(c);
        best_mean = mean;
      }
    }
    if (best_index >= 0 && best_mean > params.lambda_threshold) {
      clusters[static_cast<size_t>(best_index)].terms.push_back({term, freq});
    } else {
      AspectCluster cluster;
      cluster.cluster_id = static_cast<int>(clusters.size());
      cluster.polarity = pool.polarity;
      cluster.terms.push_back({term, freq});
      clusters.push_back(std::move(cluster));
    }
  }

  for (auto& cluster : clusters) {
    for (const auto& member : cluster.terms) {
      auto it = pool.term_comments.find(member.term);
      if (it != pool.term_comments.end()) {
        cluster.member_comment_ids.insert(it->second.begin(), it->second.end());
      }
    }
  }

  std::stable_sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    if (a.prevalence() != b.prevalence()) return a.prevalence() > b.prevalence();
    return a.cluster_id < b.cluster_id;
  });
  return clusters;
}

std::map<std::string, std::set<int>> clusters_to_memberships(
    const std::vector<AspectCluster>& clusters) {
  std::map<std::string, std::set<int>> memberships;
  for (const auto& cluster : clusters) {
    for (const auto& id : cluster.member_comment_ids) {
      memberships[id].insert(cluster.cluster_id);
    }
  }
  return memberships;
}

}  // namespace pakpa
