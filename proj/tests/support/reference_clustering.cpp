#include "reference_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oracle {

std::vector<double> embed(const std::string& term, const Vocab& vocab, int dim) {
    std::vector<std::vector<double>> found;
    std::istringstream stream(term);
    std::string token;
    while (stream >> token) {
        auto it = vocab.find(token);
        if (it != vocab.end()) found.push_back(it->second);
    }
    std::vector<double> mean(static_cast<size_t>(dim), 0.0);
    if (found.empty()) return mean;
    for (const auto& vec : found) {
        for (int d = 0; d < dim; ++d) mean[static_cast<size_t>(d)] += vec[static_cast<size_t>(d)];
    }
    for (double& component : mean) component /= static_cast<double>(found.size());
    return mean;
}

double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (size_t d = 0; d < a.size(); ++d) {
        dot += a[d] * b[d];
        na += a[d] * a[d];
        nb += b[d] * b[d];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Cluster> greedy_clusters(
    const std::map<std::string, int>& term_freq,
    const std::map<std::string, std::set<std::string>>& term_comments, const Vocab& vocab,
    int dim, double lambda) {
    // Step 1: rank terms.
    std::vector<std::string> order;
    for (const auto& [term, freq] : term_freq) order.push_back(term);
    std::sort(order.begin(), order.end(),
              [&term_freq](const std::string& a, const std::string& b) {
                  const int fa = term_freq.at(a);
                  const int fb = term_freq.at(b);
                  if (fa != fb) return fa > fb;
                  return a < b;
              });

    // Step 2 + 3: greedy assignment.
    std::vector<Cluster> clusters;
    for (const std::string& term : order) {
        const std::vector<double> candidate = embed(term, vocab, dim);
        double best_mean = -2.0;
        int best = -1;
        for (size_t c = 0; c < clusters.size(); ++c) {
            double total = 0.0;
            for (const std::string& member : clusters[c].terms) {
                total += cos_sim(candidate, embed(member, vocab, dim));
            }
            const double mean = total / static_cast<double>(clusters[c].terms.size());
            if (mean > best_mean) {  // strict >: the earliest group keeps ties
                best_mean = mean;
                best = static_cast<int>(c);
            }
        }
        if (best >= 0 && best_mean > lambda) {
            clusters[static_cast<size_t>(best)].terms.push_back(term);
        } else {
            Cluster fresh;
            fresh.id = static_cast<int>(clusters.size());
            fresh.terms.push_back(term);
            clusters.push_back(std::move(fresh));
        }
    }

    // Step 4: memberships and output order.
    for (Cluster& cluster : clusters) {
        for (const std::string& term : cluster.terms) {
            auto it = term_comments.find(term);
            if (it == term_comments.end()) continue;
            cluster.comments.insert(it->second.begin(), it->second.end());
        }
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.prevalence() != b.prevalence()) return a.prevalence() > b.prevalence();
        return a.id < b.id;
    });
    return clusters;
}

}  // namespace oracle
