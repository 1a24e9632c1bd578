#include "pakpa/core.hpp"

#include <algorithm>
#include <cctype>
#include <ctime>

namespace pakpa {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::TemplateMismatch: return "TemplateMismatch";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::AuthMissing: return "AuthMissing";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnknownPolarity: return "UnknownPolarity";
    case ErrorCode::EmptyGeneration: return "EmptyGeneration";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownComment: return "UnknownComment";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NoComparisons: return "NoComparisons";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NoVotes: return "NoVotes";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

std::string to_string(Category category) {
  switch (category) {
    case Category::Arts: return "arts";
    case Category::Auto: return "auto";
    case Category::Beauty: return "beauty";
    case Category::Hotels: return "hotels";
    case Category::Restaurants: return "restaurants";
    case Category::Other: return "other";
  }
  return "other";
}

Category category_from_string(const std::string& name) {
  if (name == "arts") return Category::Arts;
  if (name == "auto") return Category::Auto;
  if (name == "beauty") return Category::Beauty;
  if (name == "hotels") return Category::Hotels;
  if (name == "restaurants") return Category::Restaurants;
  if (name == "other") return Category::Other;
  throw Error(ErrorCode::ParseError, "unknown category '" + name + "'");
}

std::string to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::Positive: return "positive";
    case Polarity::Neutral: return "neutral";
    case Polarity::Negative: return "negative";
  }
  return "neutral";
}

Polarity polarity_from_string(const std::string& name) {
  if (name == "positive") return Polarity::Positive;
  if (name == "neutral") return Polarity::Neutral;
  if (name == "negative") return Polarity::Negative;
  throw Error(ErrorCode::UnknownPolarity, "'" + name + "'");
}

std::string trim(const std::string& text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

std::string lowercase(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string collapse_whitespace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string normalize_aspect_term(const std::string& term) {
  return collapse_whitespace(lowercase(trim(term)));
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Missing keys and type mismatches surface as the library's own parse error
// rather than a bare nlohmann exception.
template <typename Body>
auto parse_record(const char* kind, Body&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(kind) + " record: " + e.what());
  }
}

}  // namespace

json to_json(const EntityRef& entity) {
  return json{{"entity_id", entity.entity_id}, {"category", to_string(entity.category)}};
}

EntityRef entity_from_json(const json& j) {
  return parse_record("entity", [&] {
    EntityRef entity;
    entity.entity_id = j.at("entity_id").get<std::string>();
    entity.category = category_from_string(j.at("category").get<std::string>());
    if (entity.entity_id.empty()) {
      throw Error(ErrorCode::ParseError, "entity_id must be non-empty");
    }
    return entity;
  });
}

json to_json(const ReviewComment& comment) {
  return json{{"comment_id", comment.comment_id},
              {"entity", to_json(comment.entity)},
              {"review_id", comment.review_id},
              {"sentence_index", comment.sentence_index},
              {"text", comment.text}};
}

ReviewComment comment_from_json(const json& j) {
  return parse_record("comment", [&] {
    ReviewComment comment;
    comment.comment_id = j.at("comment_id").get<std::string>();
    comment.entity = entity_from_json(j.at("entity"));
    comment.review_id = j.at("review_id").get<std::string>();
    comment.sentence_index = j.at("sentence_index").get<int>();
    comment.text = j.at("text").get<std::string>();
    return comment;
  });
}

json to_json(const AspectAnnotation& annotation) {
  json pairs = json::array();
  for (const auto& pair : annotation.pairs) {
    pairs.push_back({{"aspect", pair.aspect}, {"sentiment", to_string(pair.sentiment)}});
  }
  return json{{"comment_id", annotation.comment_id}, {"pairs", pairs}};
}

AspectAnnotation annotation_from_json(const json& j) {
  return parse_record("annotation", [&] {
    AspectAnnotation annotation;
    annotation.comment_id = j.at("comment_id").get<std::string>();
    for (const auto& pair : j.at("pairs")) {
      annotation.pairs.push_back(
          {pair.at("aspect").get<std::string>(),
           polarity_from_string(pair.at("sentiment").get<std::string>())});
    }
    return annotation;
  });
}

json to_json(const AspectCluster& cluster) {
  json terms = json::array();
  for (const auto& tf : cluster.terms) {
    terms.push_back({{"term", tf.term}, {"freq", tf.freq}});
  }
  return json{{"cluster_id", cluster.cluster_id},
              {"polarity", to_string(cluster.polarity)},
              {"terms", terms},
              {"comment_ids", cluster.member_comment_ids},
              {"prevalence", cluster.prevalence()}};
}

AspectCluster cluster_from_json(const json& j) {
  return parse_record("cluster", [&] {
    AspectCluster cluster;
    cluster.cluster_id = j.at("cluster_id").get<int>();
    cluster.polarity = polarity_from_string(j.at("polarity").get<std::string>());
    for (const auto& tf : j.at("terms")) {
      cluster.terms.push_back({tf.at("term").get<std::string>(), tf.at("freq").get<int>()});
    }
    for (const auto& id : j.at("comment_ids")) {
      cluster.member_comment_ids.insert(id.get<std::string>());
    }
    return cluster;
  });
}

json to_json(const KeyPoint& kp) {
  return json{{"text", kp.text},
              {"polarity", to_string(kp.polarity)},
              {"cluster_id", kp.cluster_id},
              {"prevalence", kp.prevalence()},
              {"comment_ids", kp.matched_comment_ids}};
}

KeyPoint keypoint_from_json(const json& j) {
  return parse_record("key point", [&] {
    KeyPoint kp;
    kp.text = j.at("text").get<std::string>();
    kp.polarity = polarity_from_string(j.at("polarity").get<std::string>());
    kp.cluster_id = j.at("cluster_id").get<int>();
    for (const auto& id : j.at("comment_ids")) {
      kp.matched_comment_ids.insert(id.get<std::string>());
    }
    return kp;
  });
}

ReviewComment CommentValidator::validate(const RawCommentInput& raw) {
  std::string text = trim(raw.text);
  if (text.empty()) {
    throw Error(ErrorCode::EmptyText,
                "comment text empty after trimming (" + raw.entity.entity_id + "/" +
                    raw.review_id + "/" + std::to_string(raw.sentence_index) + ")");
  }
  std::string id = raw.entity.entity_id + "/" + raw.review_id + "/" +
                   std::to_string(raw.sentence_index);
  if (!seen_ids_.insert(id).second) {
    throw Error(ErrorCode::DuplicateId, id);
  }
  ReviewComment comment;
  comment.comment_id = id;
  comment.entity = raw.entity;
  comment.review_id = raw.review_id;
  comment.sentence_index = raw.sentence_index;
  comment.text = text;
  return comment;
}

}  // namespace pakpa
