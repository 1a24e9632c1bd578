#include "pakpa/ingestion.hpp"

#include <algorithm>
#include <cctype>

#include "pakpa/jsonl.hpp"

namespace pakpa {

void CorpusFilter::check() const {
  if (max_sentences_per_review <= 0 || min_reviews_per_entity <= 0 ||
      max_reviews_per_entity <= 0 || top_entities_per_category <= 0) {
    throw Error(ErrorCode::ConfigError, "corpus filter fields must be positive");
  }
  if (min_reviews_per_entity > max_reviews_per_entity) {
    throw Error(ErrorCode::ConfigError, "min_reviews_per_entity > max_reviews_per_entity");
  }
}

CorpusFormat corpus_format_from_string(const std::string& name) {
  if (name == "yelp") return CorpusFormat::Yelp;
  if (name == "space") return CorpusFormat::Space;
  throw Error(ErrorCode::ConfigError, "unknown corpus format '" + name + "'");
}

std::vector<RawReview> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::vector<RawReview> reviews;
  int line_number = 0;
  for (const auto& row : read_jsonl(path)) {
    ++line_number;
    for (const char* field : {"entity_id", "review_id", "text"}) {
      if (!row.contains(field)) {
        throw Error(ErrorCode::MissingField, std::string(field));
      }
    }
    RawReview review;
    review.entity.entity_id = row.at("entity_id").get<std::string>();
    if (row.contains("category")) {
      review.entity.category = category_from_string(row.at("category").get<std::string>());
    } else {
      review.entity.category =
          format == CorpusFormat::Space ? Category::Hotels : Category::Other;
    }
    review.review_id = row.at("review_id").get<std::string>();
    review.text = row.at("text").get<std::string>();
    if (review.entity.entity_id.empty()) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(line_number) + ": entity_id empty");
    }
    if (review.text.empty()) {
      throw Error(ErrorCode::ParseError,
                  "record " + std::to_string(line_number) + ": text empty");
    }
    for (const auto& [key, value] : row.items()) {
      if (key == "entity_id" || key == "category" || key == "review_id" || key == "text") {
        continue;
      }
      if (value.is_string()) review.metadata[key] = value.get<std::string>();
    }
    reviews.push_back(std::move(review));
  }
  return reviews;
}

namespace {

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// Stop-list entries are matched as a lowercased suffix ending at the period,
// and the character before the match must not be alphanumeric ("first." must
// not trigger "st.").
const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> kList = {"dr.",  "mr.",  "mrs.", "st.",
                                                 "etc.", "e.g.", "i.e.", "u.s."};
  return kList;
}

bool ends_with_abbreviation(const std::string& text, size_t period_pos) {
  for (const auto& abbr : abbreviations()) {
    if (period_pos + 1 < abbr.size()) continue;
    size_t start = period_pos + 1 - abbr.size();
    bool match = true;
    for (size_t k = 0; k < abbr.size(); ++k) {
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[start + k])));
      if (c != abbr[k]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    if (start == 0 || !std::isalnum(static_cast<unsigned char>(text[start - 1]))) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> split_sentences_text(const std::string& text) {
  std::vector<std::string> sentences;
  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    size_t run_end = i;
    while (run_end + 1 < text.size() && is_terminal(text[run_end + 1])) ++run_end;

    bool boundary = false;
    size_t j = run_end + 1;
    if (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) {
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && std::isupper(static_cast<unsigned char>(text[j]))) {
        boundary = true;
      }
    }
    if (boundary && run_end == i && text[i] == '.' && ends_with_abbreviation(text, i)) {
      boundary = false;
    }
    if (boundary) {
      std::string sentence = trim(text.substr(start, run_end - start + 1));
      if (!sentence.empty()) sentences.push_back(std::move(sentence));
      start = run_end + 1;
    }
    i = run_end + 1;
  }
  std::string tail = trim(text.substr(start));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

std::vector<ReviewComment> split_sentences(const RawReview& review) {
  std::vector<ReviewComment> comments;
  int index = 0;
  for (const auto& sentence : split_sentences_text(review.text)) {
    ReviewComment comment;
    comment.entity = review.entity;
    comment.review_id = review.review_id;
    comment.sentence_index = index++;
    comment.text = sentence;
    comment.comment_id = review.entity.entity_id + "/" + review.review_id + "/" +
                         std::to_string(comment.sentence_index);
    comments.push_back(std::move(comment));
  }
  return comments;
}

std::vector<ReviewComment> corpus_to_comments(const std::vector<RawReview>& reviews) {
  CommentValidator validator;
  std::vector<ReviewComment> comments;
  for (const auto& review : reviews) {
    int index = 0;
    for (const auto& sentence : split_sentences_text(review.text)) {
      RawCommentInput raw;
      raw.entity = review.entity;
      raw.review_id = review.review_id;
      raw.sentence_index = index++;
      raw.text = sentence;
      comments.push_back(validator.validate(raw));
    }
  }
  return comments;
}

std::vector<RawReview> apply_filters(const std::vector<RawReview>& reviews,
                                     const CorpusFilter& filter) {
  filter.check();

  // Sentence-length filter first, then entity review-count band, then the
  // per-category top-K selection, all on the surviving data.
  std::vector<RawReview> kept;
  for (const auto& review : reviews) {
    int sentences = static_cast<int>(split_sentences_text(review.text).size());
    if (sentences <= filter.max_sentences_per_review) kept.push_back(review);
  }

  std::map<std::string, int> review_counts;
  std::map<std::string, Category> entity_category;
  for (const auto& review : kept) {
    review_counts[review.entity.entity_id]++;
    entity_category[review.entity.entity_id] = review.entity.category;
  }

  std::map<Category, std::vector<std::pair<std::string, int>>> per_category;
  for (const auto& [entity_id, count] : review_counts) {
    if (count < filter.min_reviews_per_entity || count > filter.max_reviews_per_entity) {
      continue;
    }
    per_category[entity_category[entity_id]].push_back({entity_id, count});
  }

  std::set<std::string> allowed;
  for (auto& [category, entities] : per_category) {
    std::sort(entities.begin(), entities.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    int keep = std::min<int>(filter.top_entities_per_category,
                             static_cast<int>(entities.size()));
    for (int k = 0; k < keep; ++k) allowed.insert(entities[k].first);
  }

  std::vector<RawReview> result;
  for (const auto& review : kept) {
    if (allowed.count(review.entity.entity_id)) result.push_back(review);
  }
  return result;
}

std::map<std::string, std::vector<std::string>> load_references(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> references;
  for (const auto& row : read_jsonl(path)) {
    for (const char* field : {"entity_id", "summary_sentences"}) {
      if (!row.contains(field)) {
        throw Error(ErrorCode::MissingField, std::string(field));
      }
    }
    auto& sentences = references[row.at("entity_id").get<std::string>()];
    for (const auto& sentence : row.at("summary_sentences")) {
      sentences.push_back(sentence.get<std::string>());
    }
  }
  return references;
}

}  // namespace pakpa
