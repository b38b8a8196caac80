#include "dive/scoring.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dive/error.hpp"
#include "dive/sbow.hpp"
#include "test_util.hpp"

namespace dive {
namespace {

using testing::vec;

TEST(WordVector, DropsZerosAndCachesNorms) {
  const auto v = vec({0, 3, 0, 4});
  EXPECT_EQ(v.entries(), (std::vector<Feature>{{1, 3.0}, {3, 4.0}}));
  EXPECT_DOUBLE_EQ(v.norm1(), 7.0);
  EXPECT_DOUBLE_EQ(v.norm2(), 5.0);
  EXPECT_DOUBLE_EQ(v.at(3), 4.0);
  EXPECT_DOUBLE_EQ(v.at(2), 0.0);
  EXPECT_TRUE(vec({0, 0}).is_zero());
}

TEST(Normalize, SumsToOne) {
  double sum = 0;
  for (const auto& f : normalize(vec({1, 2, 0, 7}))) sum += f.value;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Cosine, Examples) {
  EXPECT_NEAR(*cosine(vec({1, 2, 3}), vec({1, 2, 3})), 1.0, 1e-15);
  EXPECT_EQ(*cosine(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_NEAR(*cosine(vec({1, 1}), vec({1, 0})), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(cosine(vec({0, 0}), vec({1, 0})));
}

TEST(SumDiff, Examples) {
  EXPECT_DOUBLE_EQ(sum_diff(vec({1, 1}), vec({2, 3})), 3.0);
  EXPECT_DOUBLE_EQ(sum_diff(vec({2, 3}), vec({2, 3})), 0.0);
}

TEST(Norm2Diff, Examples) {
  EXPECT_DOUBLE_EQ(norm2_diff(vec({0, 0}), vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(norm2_diff(vec({3, 4}), vec({3, 4})), 0.0);
  EXPECT_GE(norm2_diff(vec({1, 2}), vec({1, 3})), 0.0);
}

TEST(EntropyDiff, Examples) {
  EXPECT_NEAR(*entropy_diff(vec({5, 0, 0, 0}), vec({1, 1, 1, 1})), std::log(4.0), 1e-12);
  EXPECT_DOUBLE_EQ(*entropy_diff(vec({1, 2}), vec({1, 2})), 0.0);
  EXPECT_FALSE(entropy_diff(vec({0, 0}), vec({1, 2})));
}

TEST(EntropyDiff, MatchesDirectEvaluation) {
  for (int t = 0; t < 200; ++t) {
    const auto q = testing::random_nonzero(30, 0.3);
    const auto p = testing::random_nonzero(30, 0.3);
    auto h = [](const std::vector<double>& v) {
      double s = 0, out = 0;
      for (double x : v) s += x;
      for (double x : v) {
        if (x > 0) out -= (x / s) * std::log(x / s);
      }
      return out;
    };
    EXPECT_NEAR(*entropy_diff(vec(q), vec(p)), h(p) - h(q), 1e-12);
  }
}

// Rows: a, b, c, d over columns labelled a, b, c, d.
FeatureSpace slqs_fixture() {
  FeatureSpace s;
  s.kind = SpaceKind::kFreq;
  s.row_labels = {"a", "b", "c", "d"};
  s.context_labels = s.row_labels;
  s.rows = {
      {{1, 3.0}, {2, 1.0}, {3, 2.0}},  // a
      {{0, 1.0}, {2, 1.0}},            // b: entropy log 2
      {{0, 1.0}},                      // c: entropy 0
      {{0, 1.0}, {1, 1.0}, {2, 1.0}},  // d: entropy log 3
  };
  return s;
}

TEST(SlqsSub, HandComputedMedians) {
  const auto space = VectorSpace::from_features(slqs_fixture());
  const auto& a = space.row(0);
  // a's contexts ranked by value: b (3), d (2), c (1)
  EXPECT_NEAR(*median_top_context_entropy(a, space, 1), std::log(2.0), 1e-12);
  EXPECT_NEAR(*median_top_context_entropy(a, space, 2), 0.5 * (std::log(2.0) + std::log(3.0)), 1e-12);
  EXPECT_NEAR(*median_top_context_entropy(a, space, 3), std::log(2.0), 1e-12);
  const auto& d = space.row(3);
  // d: all ties, broken by id: a, b, c -> entropies of rows a, b, c
  const double ha = *entropy(space.row(0));
  EXPECT_NEAR(*median_top_context_entropy(d, space, 2), 0.5 * (ha + std::log(2.0)), 1e-12);
  EXPECT_NEAR(*slqs_sub(d, a, space, 1), std::log(2.0) - ha, 1e-12);
  EXPECT_DOUBLE_EQ(*slqs_sub(a, a, space, 100), 0.0);
  EXPECT_FALSE(slqs_sub(WordVector{}, a, space, 100));
}

TEST(Cde, Examples) {
  EXPECT_DOUBLE_EQ(*cde(vec({1, 2, 0}), vec({1, 5, 3})), 1.0);
  EXPECT_DOUBLE_EQ(*cde(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(*cde(vec({2, 2}), vec({1, 3})), 0.75);
  EXPECT_FALSE(cde(vec({0, 0}), vec({1, 3})));
}

TEST(Weeds, Examples) {
  EXPECT_DOUBLE_EQ(*weeds_precision(vec({1, 2, 0}), vec({0.1, 0.1, 5})), 1.0);
  EXPECT_DOUBLE_EQ(*weeds_precision(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(*weeds_precision(vec({2, 2}), vec({1, 0})), 0.5);
}

TEST(InvCl, Examples) {
  EXPECT_DOUBLE_EQ(*invcl(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_NEAR(*invcl(vec({2, 2}), vec({1, 3})), std::sqrt(0.1875), 1e-15);
  std::vector<double> big(1000, 1.0);
  std::vector<double> small(1000, 0.0);
  small[0] = 1.0;
  EXPECT_GT(*invcl(vec(small), vec(big)), 0.999);
}

TEST(Al1, Examples) {
  EXPECT_NEAR(*al1(vec({1, 2, 3}), vec({2, 4, 6})), 0.0, 1e-15);
  EXPECT_NEAR(*al1(vec({0, 1}), vec({1, 0}), 5.0), 1.0, 1e-15);
  EXPECT_NEAR(*al1(vec({1, 0}), vec({0.5, 0.5}), 5.0), 0.5, 1e-15);
  EXPECT_FALSE(al1(vec({0, 0}), vec({1, 0})));
  EXPECT_THROW(al1(vec({1}), vec({1}), 0.0), ConfigError);
}

TEST(RandomScore, DeterministicPerPairAndSeed) {
  EXPECT_EQ(random_score("dog", "animal", 1), random_score("dog", "animal", 1));
  EXPECT_NE(random_score("dog", "animal", 1), random_score("dog", "animal", 2));
  EXPECT_NE(random_score("dog", "animal", 1), random_score("animal", "dog", 1));
  for (int i = 0; i < 1000; ++i) {
    const double r = random_score("w" + std::to_string(i), "x", 7);
    ASSERT_GE(r, 0.0);
    ASSERT_LT(r, 1.0);
  }
}

TEST(ScorerNames, RoundTrip) {
  EXPECT_EQ(all_scorers().size(), 17u);
  for (auto k : all_scorers()) EXPECT_EQ(parse_scorer(scorer_name(k)), k);
  EXPECT_FALSE(parse_scorer("CDS"));
  EXPECT_TRUE(needs_sgns(ScorerKind::kWdS));
  EXPECT_TRUE(needs_sgns(ScorerKind::kWord2Vec));
  EXPECT_FALSE(needs_sgns(ScorerKind::kCdS));
  EXPECT_TRUE(is_generality(ScorerKind::kSumDiff));
  EXPECT_FALSE(is_generality(ScorerKind::kCde));
}

class ScorerTest : public ::testing::Test {
 protected:
  ScorerTest() {
    FeatureSpace main;
    main.kind = SpaceKind::kFreq;
    main.row_labels = {"q", "p", "z"};
    main.context_labels = {"q", "p", "z"};
    main.rows = {{{0, 1.0}, {1, 1.0}}, {{0, 2.0}, {1, 2.0}}, {}};
    space = VectorSpace::from_features(main);
    FeatureSpace w2v = main;
    w2v.rows = {{{0, 1.0}}, {{0, 1.0}, {1, 1.0}}, {{2, 1.0}}};
    sgns = VectorSpace::from_features(w2v);
  }
  PairVectors pair(std::string_view q, std::string_view p) const {
    return {space.find(q), space.find(p), sgns.find(q), sgns.find(p), q, p};
  }
  VectorSpace space;
  VectorSpace sgns;
};

TEST_F(ScorerTest, CombinedScores) {
  // C.dS on p = 2q: cosine 1 times |q|_1
  EXPECT_NEAR(*Scorer(ScorerKind::kCdS, &space).score(pair("q", "p")), 2.0, 1e-12);
  // W.dS: sgns cosine 1/sqrt2 times dS 2
  EXPECT_NEAR(*Scorer(ScorerKind::kWdS, &space, &sgns).score(pair("q", "p")), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(*Scorer(ScorerKind::kCdS, &space).score(pair("q", "q")), 0.0, 1e-15);
  EXPECT_NEAR(*Scorer(ScorerKind::kWord2Vec, &space, &sgns).score(pair("q", "p")), 1 / std::sqrt(2.0),
              1e-12);
  EXPECT_NEAR(*Scorer(ScorerKind::kCdE, &space).score(pair("q", "p")), 0.0, 1e-12);
}

TEST_F(ScorerTest, Al1IsNegated) {
  EXPECT_LE(*Scorer(ScorerKind::kAl1, &space).score(pair("q", "p")), 0.0);
}

TEST_F(ScorerTest, OovPropagation) {
  for (auto k : all_scorers()) {
    if (k == ScorerKind::kRandom) continue;
    const Scorer s(k, &space, &sgns);
    EXPECT_FALSE(s.score(pair("q", "missing"))) << scorer_name(k);
    if (k != ScorerKind::kWord2Vec) EXPECT_FALSE(s.score(pair("z", "p"))) << scorer_name(k);
  }
  // word2vec only reads the skip-gram space, where z has a vector.
  EXPECT_TRUE(Scorer(ScorerKind::kWord2Vec, &space, &sgns).score(pair("z", "p")));
  EXPECT_TRUE(Scorer(ScorerKind::kRandom, &space).score(pair("missing", "p")));
}

TEST_F(ScorerTest, Validation) {
  EXPECT_THROW(Scorer(ScorerKind::kWdS, &space), ConfigError);
  EXPECT_THROW(Scorer(ScorerKind::kWord2Vec, &space), ConfigError);
  Embedding emb({"q", "p"}, 2, EmbeddingKind::kDive);
  const auto dense = VectorSpace::from_embedding(emb);
  EXPECT_THROW(Scorer(ScorerKind::kSlqsSub, &dense), ConfigError);
}

}  // namespace
}  // namespace dive
