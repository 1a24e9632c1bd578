#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pakpa/core.hpp"

namespace pakpa {

struct RawReview {
  EntityRef entity;
  std::string review_id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

/// Corpus filtering rules: reviews over the sentence limit are dropped,
/// entities outside the review-count band are dropped, and each category
/// keeps only its top entities by review count.
struct CorpusFilter {
  int max_sentences_per_review = 15;
  int min_reviews_per_entity = 50;
  int max_reviews_per_entity = 100;
  int top_entities_per_category = 10;

  void check() const;
};

enum class CorpusFormat { Yelp, Space };

CorpusFormat corpus_format_from_string(const std::string& name);

/// Loads a JSONL review corpus: one {"entity_id","category","review_id","text"}
/// object per line, order preserved. "category" may be omitted; it defaults to
/// "other" for yelp input and "hotels" for space input.
std::vector<RawReview> load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Rule-based sentence splitter: a run of [.?!] ends a sentence when followed
/// by whitespace and an uppercase letter, or by end of text. A single period
/// closing a stop-list abbreviation (Dr., Mr., Mrs., St., etc., e.g., i.e.,
/// U.S.) never splits. ASCII case classes only.
std::vector<std::string> split_sentences_text(const std::string& text);

/// Splits one review into ReviewComments with consecutive sentence indices
/// starting at 0. Whitespace-only text yields an empty list.
std::vector<ReviewComment> split_sentences(const RawReview& review);

/// Converts a whole corpus to comments, enforcing comment-id uniqueness.
std::vector<ReviewComment> corpus_to_comments(const std::vector<RawReview>& reviews);

std::vector<RawReview> apply_filters(const std::vector<RawReview>& reviews,
                                     const CorpusFilter& filter);

/// SPACE reference summaries: JSONL {"entity_id","summary_sentences":[...]}.
std::map<std::string, std::vector<std::string>> load_references(
    const std::filesystem::path& path);

}  // namespace pakpa
