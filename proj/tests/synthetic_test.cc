#include "dive/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "dive/cooccur.hpp"
#include "dive/corpus.hpp"
#include "dive/error.hpp"

namespace dive {
namespace {

TaxonomyParams small_params() {
  TaxonomyParams p;
  p.concepts = 30;
  p.roots = 5;
  p.tokens = 60'000;
  p.noise_vocab = 500;
  return p;
}

TEST(Synthetic, ChildContextsAreSubsetsOfParent) {
  const auto tax = make_synthetic_taxonomy(11, small_params());
  for (std::size_t i = 0; i < tax.parent.size(); ++i) {
    if (tax.parent[i] < 0) continue;
    const auto& child = tax.contexts[i];
    const auto& parent = tax.contexts[static_cast<std::size_t>(tax.parent[i])];
    ASSERT_TRUE(std::includes(parent.begin(), parent.end(), child.begin(), child.end()));
    ASSERT_LT(child.size(), parent.size());
  }
}

TEST(Synthetic, PlantedPairsAreExactlyAncestry) {
  const auto tax = make_synthetic_taxonomy(11, small_params());
  std::set<std::pair<std::size_t, std::size_t>> planted(tax.planted.begin(), tax.planted.end());
  const auto n = tax.concept_words.size();
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t a = 0; a < n; ++a) {
      ASSERT_EQ(planted.count({d, a}) == 1, tax.is_ancestor(a, d));
    }
  }
  for (auto [q, p] : tax.random_negatives) ASSERT_FALSE(tax.is_ancestor(p, q));
  for (auto [q, p] : tax.sibling_negatives) ASSERT_EQ(tax.parent[q], tax.parent[p]);
}

TEST(Synthetic, ExactTokenCountAndChunking) {
  auto params = small_params();
  params.tokens = 12'345;
  const auto tax = make_synthetic_taxonomy(3, params);
  EXPECT_EQ(tax.token_count, 12'345u);
  PreprocessConfig cfg;
  cfg.chunk_length = params.chunk_length;
  const auto stream = preprocess(tax.corpus, cfg);
  EXPECT_EQ(stream.token_count(), 12'345u);
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = make_synthetic_taxonomy(5, small_params());
  const auto b = make_synthetic_taxonomy(5, small_params());
  const auto c = make_synthetic_taxonomy(6, small_params());
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_NE(a.corpus, c.corpus);
}

TEST(Synthetic, Datasets) {
  const auto tax = make_synthetic_taxonomy(11, small_params());
  const auto pos = tax.dataset(false, false);
  EXPECT_EQ(pos.positives(), pos.pairs.size());
  EXPECT_EQ(pos.pairs.size(), tax.planted.size());
  const auto mixed = tax.dataset(true, true);
  EXPECT_EQ(mixed.positives(), tax.planted.size());
  EXPECT_GT(mixed.pairs.size(), pos.pairs.size());
  const auto rev = tax.reversed_planted();
  ASSERT_EQ(rev.pairs.size(), tax.planted.size());
  EXPECT_EQ(rev.pairs[0].q_text, pos.pairs[0].p_text);
}

TEST(Synthetic, Errors) {
  TaxonomyParams p;
  p.roots = 0;
  EXPECT_THROW(make_synthetic_taxonomy(1, p), ConfigError);
  p = {};
  p.own_contexts = 0;
  EXPECT_THROW(make_synthetic_taxonomy(1, p), ConfigError);
  p = {};
  p.mention_rate = 1.0;
  EXPECT_THROW(make_synthetic_taxonomy(1, p), ConfigError);
  p = {};
  p.roots = 1;
  p.max_children = 1;
  p.max_depth = 2;  // room for only one child
  EXPECT_THROW(make_synthetic_taxonomy(1, p), ConfigError);
}

TEST(Synthetic, HyponymContextsIncludedInCorpusCounts) {
  // Contexts seen with a hyponym are nearly always seen with its hypernyms.
  auto params = small_params();
  params.tokens = 300'000;
  const auto tax = make_synthetic_taxonomy(2, params);
  PreprocessConfig cfg;
  const auto stream = preprocess(tax.corpus, cfg);
  const auto vocab = build_vocab(stream, 1);
  const auto stats = count_cooccurrences(encode(stream, vocab), vocab, Window::symmetric(20));
  std::size_t checked = 0, included = 0;
  for (auto [d, a] : tax.planted) {
    const auto q = vocab.id(tax.concept_words[d]);
    const auto p = vocab.id(tax.concept_words[a]);
    ASSERT_TRUE(q && p);
    for (const auto& ctx : tax.contexts[d]) {
      const auto c = vocab.id(ctx);
      if (!c || stats.count(*q, *c) == 0) continue;
      ++checked;
      if (stats.count(*p, *c) > 0) ++included;
    }
  }
  ASSERT_GT(checked, 0u);
  EXPECT_GE(static_cast<double>(included), 0.95 * static_cast<double>(checked));
}

}  // namespace
}  // namespace dive
