#pragma once

#include <compare>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "pakpa/error.hpp"

namespace pakpa {

using json = nlohmann::json;

enum class Category { Arts, Auto, Beauty, Hotels, Restaurants, Other };

enum class Polarity { Positive, Neutral, Negative };

std::string to_string(Category category);
Category category_from_string(const std::string& name);

std::string to_string(Polarity polarity);
Polarity polarity_from_string(const std::string& name);

// Text normalization shared across modules. ASCII-only case folding; the
// corpora are English reviews.
std::string trim(const std::string& text);
std::string lowercase(const std::string& text);
std::string collapse_whitespace(const std::string& text);

/// Lowercase + whitespace-collapse + trim, applied to every aspect term at
/// the module boundary so frequency counting sees one spelling per term.
std::string normalize_aspect_term(const std::string& term);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso_utc_now();

struct EntityRef {
  std::string entity_id;
  Category category = Category::Other;

  auto operator<=>(const EntityRef&) const = default;
};

/// One review sentence; the atomic unit of analysis.
struct ReviewComment {
  std::string comment_id;  // "entity/review/index"
  EntityRef entity;
  std::string review_id;
  int sentence_index = 0;
  std::string text;

  auto operator<=>(const ReviewComment&) const = default;
};

struct AspectPair {
  std::string aspect;
  Polarity sentiment = Polarity::Neutral;

  auto operator<=>(const AspectPair&) const = default;
};

/// The (aspect term, sentiment) pairs extracted from one comment. May be
/// empty when the comment carries no aspect.
struct AspectAnnotation {
  std::string comment_id;
  std::vector<AspectPair> pairs;

  auto operator<=>(const AspectAnnotation&) const = default;
};

struct TermFreq {
  std::string term;
  int freq = 0;

  auto operator<=>(const TermFreq&) const = default;
};

/// One polarity-homogeneous group of aspect terms plus the comments that
/// mention them. Prevalence is the number of distinct member comments.
struct AspectCluster {
  int cluster_id = 0;
  Polarity polarity = Polarity::Positive;  // never Neutral
  std::vector<TermFreq> terms;             // insertion order = admission order
  std::set<std::string> member_comment_ids;

  int prevalence() const { return static_cast<int>(member_comment_ids.size()); }

  auto operator<=>(const AspectCluster&) const = default;
};

/// Generated summary sentence with prevalence count and matched comments.
struct KeyPoint {
  std::string text;
  Polarity polarity = Polarity::Positive;
  int cluster_id = 0;
  std::set<std::string> matched_comment_ids;

  int prevalence() const { return static_cast<int>(matched_comment_ids.size()); }

  auto operator<=>(const KeyPoint&) const = default;
};

// JSON shapes. Field names are the wire contract used by every file format.
json to_json(const EntityRef& entity);
json to_json(const ReviewComment& comment);
json to_json(const AspectAnnotation& annotation);
json to_json(const AspectCluster& cluster);
json to_json(const KeyPoint& kp);

EntityRef entity_from_json(const json& j);
ReviewComment comment_from_json(const json& j);
AspectAnnotation annotation_from_json(const json& j);
AspectCluster cluster_from_json(const json& j);
KeyPoint keypoint_from_json(const json& j);

struct RawCommentInput {
  EntityRef entity;
  std::string review_id;
  int sentence_index = 0;
  std::string text;
};

/// Validates candidate comments and tracks (review_id, sentence_index)
/// uniqueness within each entity across a whole corpus load.
class CommentValidator {
 public:
  /// Trims the text and assigns comment_id "entity/review/index".
  /// Throws EmptyText when the text is whitespace-only and DuplicateId when
  /// the same (entity, review, index) was seen before.
  ReviewComment validate(const RawCommentInput& raw);

 private:
  std::set<std::string> seen_ids_;
};

}  // namespace pakpa
