#include <doctest.h>

#include <cmath>
#include <fstream>

#include "pakpa/error.hpp"
#include "pakpa/evaluation.hpp"
#include "support/temp_dir.hpp"

using namespace pakpa;

namespace {

MatchRecord record(const std::string& comment, const std::string& kp,
                   const std::string& annotator, MatchJudgment judgment) {
    MatchRecord r;
    r.comment_id = comment;
    r.kp_id = kp;
    r.annotator_id = annotator;
    r.judgment = judgment;
    return r;
}

MatchVerdict verdict(bool correct) {
    MatchVerdict v;
    v.correct = correct;
    return v;
}

}  // namespace

TEST_CASE("word tokenization folds case and strips punctuation") {
    CHECK(tokenize_words("The staff, was GREAT!") ==
          std::vector<std::string>{"the", "staff", "was", "great"});
    CHECK(tokenize_words("") == std::vector<std::string>{});
    CHECK(tokenize_words("...!!!") == std::vector<std::string>{});
    CHECK(tokenize_words("café au lait") == std::vector<std::string>{"café", "au", "lait"});
}

TEST_CASE("lexical token F1 uses clipped overlap") {
    CHECK(lexical_token_f1("great staff", "great staff") == 1.0);
    CHECK(lexical_token_f1("great staff", "dirty rooms") == 0.0);
    CHECK(lexical_token_f1("", "") == 1.0);
    CHECK(lexical_token_f1("word", "") == 0.0);
    // "a a b" vs "a b b": clipped overlap = a:1 + b:1 = 2; P = R = 2/3.
    CHECK(lexical_token_f1("a a b", "a b b") == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("similarity scorers expose kind and score pairs") {
    const SimilarityScorer lexical = SimilarityScorer::lexical();
    CHECK(lexical.kind() == ScorerKind::LexicalF1);
    CHECK(lexical.score("clean room", "clean room") == 1.0);

    auto store = std::make_shared<VectorStore>();
    store->dimension = 2;
    store->table["room"] = {1.0, 0.0};
    store->table["suite"] = {0.8, 0.2};
    store->table["price"] = {0.0, 1.0};
    const SimilarityScorer embedding = SimilarityScorer::embedding(store);
    CHECK(embedding.kind() == ScorerKind::EmbeddingCosine);
    CHECK(embedding.score("room", "room") == doctest::Approx(1.0));
    CHECK(embedding.score("room", "price") == doctest::Approx(0.0));
    CHECK(embedding.score("room", "suite") > 0.9);

    const auto matrix = lexical.score_matrix({"a", "b"}, {"a", "b", "c"});
    REQUIRE(matrix.size() == 2);
    REQUIRE(matrix[0].size() == 3);
    CHECK(matrix[0][0] == 1.0);
    CHECK(matrix[1][1] == 1.0);
    CHECK(matrix[0][1] == 0.0);
}

TEST_CASE("soft scores equal the brute-force mean-of-maxima") {
    const std::vector<std::string> candidates = {"friendly staff at reception",
                                                 "spacious clean rooms",
                                                 "good value for money"};
    const std::vector<std::string> references = {"staff were friendly", "rooms are clean",
                                                 "great pool area", "value was good"};
    const SimilarityScorer scorer = SimilarityScorer::lexical();
    const SoftScores scores = soft_scores(candidates, references, scorer);

    double sp = 0.0;
    for (const auto& candidate : candidates) {
        double best = 0.0;
        for (const auto& reference : references) {
            best = std::max(best, lexical_token_f1(candidate, reference));
        }
        sp += best;
    }
    sp /= static_cast<double>(candidates.size());
    double sr = 0.0;
    for (const auto& reference : references) {
        double best = 0.0;
        for (const auto& candidate : candidates) {
            best = std::max(best, lexical_token_f1(candidate, reference));
        }
        sr += best;
    }
    sr /= static_cast<double>(references.size());

    CHECK(scores.sp == doctest::Approx(sp).epsilon(1e-12));
    CHECK(scores.sr == doctest::Approx(sr).epsilon(1e-12));
    CHECK(scores.sf1 == doctest::Approx(2.0 * sp * sr / (sp + sr)).epsilon(1e-12));

    CHECK_THROWS_AS(soft_scores({}, references, scorer), Error);
    CHECK_THROWS_AS(soft_scores(candidates, {}, scorer), Error);
}

TEST_CASE("soft F1 is zero when precision and recall are both zero") {
    const SimilarityScorer scorer = SimilarityScorer::lexical();
    const SoftScores scores = soft_scores({"aaa"}, {"bbb"}, scorer);
    CHECK(scores.sp == 0.0);
    CHECK(scores.sr == 0.0);
    CHECK(scores.sf1 == 0.0);
}

TEST_CASE("rouge variants match hand computation") {
    // "the cat sat" vs "the cat ran": R-1 and R-L share 2 of 3, R-2 shares 1 of 2.
    CHECK(rouge_f1("the cat sat", "the cat ran", RougeVariant::Rouge1) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(rouge_f1("the cat sat", "the cat ran", RougeVariant::Rouge2) ==
          doctest::Approx(0.5));
    CHECK(rouge_f1("the cat sat", "the cat ran", RougeVariant::RougeL) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(rouge_f1("identical words here", "identical words here", RougeVariant::Rouge2) ==
          1.0);
    CHECK(rouge_f1("", "anything", RougeVariant::Rouge1) == 0.0);
    CHECK(rouge_f1("one", "two", RougeVariant::Rouge2) == 0.0);  // no bigrams on either side
    // Subsequences need not be contiguous for R-L.
    CHECK(rouge_f1("a x b y c", "a b c", RougeVariant::RougeL) ==
          doctest::Approx(2.0 * (3.0 / 5.0) * 1.0 / (3.0 / 5.0 + 1.0)));
}

TEST_CASE("rouge aggregate averages the best candidate per reference") {
    const std::vector<std::string> candidates = {"a b", "c d"};
    const std::vector<std::string> references = {"a b", "c d", "e f"};
    CHECK(rouge_max_avg(candidates, references, RougeVariant::Rouge1) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(rouge_max_avg({}, references, RougeVariant::Rouge1), Error);
    CHECK_THROWS_AS(rouge_max_avg(candidates, {}, RougeVariant::Rouge1), Error);
}

TEST_CASE("pairwise strengths recover a 3:1 record as 75:25") {
    PairwiseJudgments judgments;
    judgments.dimension = QualityDimension::Coverage;
    judgments.systems = {"ours", "baseline"};
    judgments.wins = {{0, 3}, {1, 0}};
    const auto scores = bradley_terry(judgments);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(75.0).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(25.0).epsilon(1e-9));
    CHECK(scores[0] + scores[1] == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("balanced round-robins score evenly") {
    PairwiseJudgments judgments;
    judgments.dimension = QualityDimension::Faithfulness;
    judgments.systems = {"a", "b", "c"};
    judgments.wins = {{0, 2, 2}, {2, 0, 2}, {2, 2, 0}};
    const auto scores = bradley_terry(judgments);
    for (const double score : scores) {
        CHECK(score == doctest::Approx(100.0 / 3.0).epsilon(1e-9));
    }
}

TEST_CASE("comparison graphs must connect and carry data") {
    PairwiseJudgments disconnected;
    disconnected.dimension = QualityDimension::Validity;
    disconnected.systems = {"a", "b", "c", "d"};
    disconnected.wins = {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    CHECK_THROWS_AS(bradley_terry(disconnected), Error);

    PairwiseJudgments empty;
    empty.dimension = QualityDimension::Validity;
    empty.systems = {"a", "b"};
    empty.wins = {{0, 0}, {0, 0}};
    CHECK_THROWS_AS(bradley_terry(empty), Error);

    PairwiseJudgments bad_shape;
    bad_shape.dimension = QualityDimension::Validity;
    bad_shape.systems = {"a", "b"};
    bad_shape.wins = {{0, 1}};
    CHECK_THROWS_AS(bradley_terry(bad_shape), Error);

    PairwiseJudgments self_play;
    self_play.dimension = QualityDimension::Validity;
    self_play.systems = {"a", "b"};
    self_play.wins = {{2, 1}, {1, 0}};
    CHECK_THROWS_AS(bradley_terry(self_play), Error);
}

TEST_CASE("judgment files accumulate win counts per dimension") {
    testsupport::TempDir dir("judgments");
    const auto path = dir.path / "judgments.jsonl";
    {
        std::ofstream out(path);
        out << R"({"dimension":"coverage","winner":"ours","loser":"baseline"})" << "\n";
        out << R"({"dimension":"coverage","winner":"ours","loser":"baseline","count":2})"
            << "\n";
        out << R"({"dimension":"redundancy","winner":"baseline","loser":"ours"})" << "\n";
    }
    const auto loaded = load_pairwise_judgments(path);
    REQUIRE(loaded.size() == 2);
    const PairwiseJudgments& coverage = loaded.at(QualityDimension::Coverage);
    REQUIRE(coverage.systems == std::vector<std::string>{"ours", "baseline"});
    CHECK(coverage.wins[0][1] == 3);
    CHECK(coverage.wins[1][0] == 0);
    CHECK(loaded.at(QualityDimension::Redundancy).wins[0][1] == 1);
}

TEST_CASE("quality dimension names round-trip") {
    for (const char* name : {"coverage", "faithfulness", "redundancy", "validity",
                             "sentiment", "informativeness", "single_aspect"}) {
        CHECK(to_string(dimension_from_string(name)) == name);
    }
    CHECK_THROWS_AS(dimension_from_string("style"), Error);
}

TEST_CASE("kappa hits its textbook anchor points") {
    CHECK(cohens_kappa({"y", "n", "y", "n"}, {"y", "n", "y", "n"}) == 1.0);
    CHECK(cohens_kappa({"y", "n", "y", "n"}, {"n", "y", "n", "y"}) == -1.0);
    CHECK(cohens_kappa({"y", "y", "n", "n"}, {"y", "n", "y", "n"}) == 0.0);
    CHECK(cohens_kappa({"y", "y"}, {"y", "y"}) == 1.0);  // degenerate: single shared label
    CHECK_THROWS_AS(cohens_kappa({"y"}, {"y", "n"}), Error);
    CHECK_THROWS_AS(cohens_kappa({}, {}), Error);
}

TEST_CASE("annotator screening drops systematic disagreers") {
    // A, B, C share the same alternating pattern; D inverts it; E barely overlaps.
    std::vector<MatchRecord> records;
    const std::vector<std::string> items = {"i1", "i2", "i3", "i4"};
    for (const std::string& annotator : {"A", "B", "C"}) {
        for (size_t i = 0; i < items.size(); ++i) {
            records.push_back(record(items[i], "kp", annotator,
                                     i % 2 == 0 ? MatchJudgment::Yes : MatchJudgment::No));
        }
    }
    for (size_t i = 0; i < items.size(); ++i) {
        records.push_back(
            record(items[i], "kp", "D", i % 2 == 0 ? MatchJudgment::No : MatchJudgment::Yes));
    }
    records.push_back(record("i1", "kp", "E", MatchJudgment::Yes));

    const AnnotatorFilterResult result = annotator_kappa_filter(records, 2, 2);
    CHECK(result.kept == std::set<std::string>{"A", "B", "C", "E"});
    REQUIRE(result.excluded.count("D") == 1);
    CHECK(result.excluded.at("D") == doctest::Approx(-1.0));
    CHECK(result.kappa.count("E") == 0);  // too few peers to measure
    CHECK(result.kappa.at("A") == doctest::Approx(1.0 / 3.0));

    const auto filtered = filter_records(records, result);
    CHECK(filtered.size() == records.size() - items.size());
}

TEST_CASE("match verdicts follow the sixty percent rule with faulty in the total") {
    std::vector<MatchRecord> records;
    // c1/k1: 3 yes of 5 -> exactly 60%, counts as correct.
    for (int i = 0; i < 3; ++i) {
        records.push_back(record("c1", "k1", "a" + std::to_string(i), MatchJudgment::Yes));
    }
    records.push_back(record("c1", "k1", "a3", MatchJudgment::No));
    records.push_back(record("c1", "k1", "a4", MatchJudgment::No));
    // c1/k2: 3 yes of 6 (one faulty) -> 50%, incorrect.
    for (int i = 0; i < 3; ++i) {
        records.push_back(record("c1", "k2", "b" + std::to_string(i), MatchJudgment::Yes));
    }
    records.push_back(record("c1", "k2", "b3", MatchJudgment::No));
    records.push_back(record("c1", "k2", "b4", MatchJudgment::No));
    records.push_back(record("c1", "k2", "b5", MatchJudgment::Faulty));
    // c2/k1: 4 yes of 6 -> correct.
    for (int i = 0; i < 4; ++i) {
        records.push_back(record("c2", "k1", "c" + std::to_string(i), MatchJudgment::Yes));
    }
    records.push_back(record("c2", "k1", "c4", MatchJudgment::No));
    records.push_back(record("c2", "k1", "c5", MatchJudgment::Faulty));

    const auto verdicts = aggregate_matches(records);
    REQUIRE(verdicts.size() == 3);
    CHECK(verdicts[0].comment_id == "c1");
    CHECK(verdicts[0].kp_id == "k1");
    CHECK(verdicts[0].yes_votes == 3);
    CHECK(verdicts[0].total_votes == 5);
    CHECK(verdicts[0].correct);
    CHECK_FALSE(verdicts[1].correct);
    CHECK(verdicts[1].total_votes == 6);
    CHECK(verdicts[2].correct);

    CHECK_THROWS_AS(aggregate_matches({}), Error);
}

TEST_CASE("quantification precision averages categories without weighting") {
    std::map<Category, std::vector<MatchVerdict>> by_category;
    by_category[Category::Hotels] = {verdict(true), verdict(true), verdict(false),
                                     verdict(false)};
    by_category[Category::Restaurants] = {verdict(true), verdict(true), verdict(true),
                                          verdict(false)};
    const QuantificationReport report = quantification_precision(by_category);
    CHECK(report.per_category.at(Category::Hotels).precision == 0.5);
    CHECK(report.per_category.at(Category::Restaurants).precision == 0.75);
    CHECK(report.per_category.at(Category::Restaurants).correct == 3);
    CHECK(report.per_category.at(Category::Restaurants).total == 4);
    CHECK(report.average == doctest::Approx(0.625));

    CHECK_THROWS_AS(quantification_precision({}), Error);
    by_category[Category::Auto] = {};
    CHECK_THROWS_AS(quantification_precision(by_category), Error);
}

TEST_CASE("match records load from CSV and JSONL alike") {
    testsupport::TempDir dir("matches");
    const auto csv_path = dir.path / "matches.csv";
    {
        std::ofstream out(csv_path);
        out << "comment_id,kp_id,annotator_id,judgment\n";
        out << "c1,k1,ann1,yes\n";
        out << "c1,k1,ann2,no\n";
        out << "c2,k1,ann1,faulty\n";
    }
    const MatchAnnotationSet from_csv = load_match_records(csv_path);
    REQUIRE(from_csv.records.size() == 3);
    CHECK(from_csv.records[0].judgment == MatchJudgment::Yes);
    CHECK(from_csv.records[2].judgment == MatchJudgment::Faulty);

    const auto jsonl_path = dir.path / "matches.jsonl";
    {
        std::ofstream out(jsonl_path);
        out << R"({"comment_id":"c1","kp_id":"k1","annotator_id":"ann1","judgment":"yes"})"
            << "\n";
    }
    CHECK(load_match_records(jsonl_path).records.size() == 1);

    {
        std::ofstream out(csv_path);
        out << "comment_id,kp_id,annotator_id,judgment\n";
        out << "c1,k1,ann1,yes\n";
        out << "c1,k1,ann1,no\n";  // same triple twice
    }
    CHECK_THROWS_AS(load_match_records(csv_path), Error);
}

TEST_CASE("reference sentences split by lexicon polarity") {
    testsupport::TempDir dir("lexicon");
    const auto positive_path = dir.path / "positive.txt";
    const auto negative_path = dir.path / "negative.txt";
    std::ofstream(positive_path) << "# positives\ngreat\nfriendly\nclean\n";
    std::ofstream(negative_path) << "# negatives\ndirty\nrude\nnoisy\n";
    const LexiconClassifier classifier =
        load_lexicon_classifier(positive_path, negative_path);

    CHECK(classifier("The staff was friendly and great.") == Polarity::Positive);
    CHECK(classifier("Dirty and noisy rooms.") == Polarity::Negative);
    CHECK(classifier("The rooms exist.") == Polarity::Neutral);
    CHECK(classifier("Great but dirty.") == Polarity::Neutral);  // tied hits

    const auto [positive, negative] = split_references_by_polarity(
        {"Great pool.", "Rude staff.", "The lobby."}, classifier);
    CHECK(positive == std::vector<std::string>{"Great pool."});
    CHECK(negative == std::vector<std::string>{"Rude staff."});
}

TEST_CASE("scorer kind names round-trip") {
    for (const char* name : {"lexical_f1", "embedding_cosine", "external"}) {
        CHECK(to_string(scorer_kind_from_string(name)) == name);
    }
    CHECK_THROWS_AS(scorer_kind_from_string("bertscore"), Error);
}
