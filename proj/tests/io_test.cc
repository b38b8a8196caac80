#include <gtest/gtest.h>

#include <sstream>

#include "dive/cooccur.hpp"
#include "dive/corpus.hpp"
#include "dive/embedding.hpp"
#include "dive/error.hpp"
#include "dive/sbow.hpp"
#include "test_util.hpp"

namespace dive {
namespace {

TEST(Io, TokenStreamRoundTrip) {
  TokenStream s{{{"a", "dog_NN"}, {"c"}}};
  std::stringstream buf;
  write_token_stream(buf, s);
  EXPECT_EQ(read_token_stream(buf), s);
}

TEST(Io, VocabularyRoundTrip) {
  const Vocabulary v({"dog", "cat", "zebra"}, {10, 7, 7});
  std::stringstream buf;
  v.save(buf);
  EXPECT_EQ(Vocabulary::load(buf), v);
  std::istringstream bad("dog\tten\n");
  EXPECT_THROW(Vocabulary::load(bad), ParseError);
}

TEST(Io, CoocRoundTripKeepsFilteredMarginals) {
  for (int t = 0; t < 20; ++t) {
    const auto stats = testing::random_stats(testing::uniform_int(2, 25), 0.3, 50);
    for (const auto& s : {stats, pmi_filter(stats, 1.5)}) {
      std::stringstream buf;
      save_cooc(buf, s);
      const auto back = load_cooc(buf);
      ASSERT_EQ(back, s);
      ASSERT_EQ(back.avg_freq(), s.avg_freq());
      ASSERT_EQ(back.filter_threshold(), s.filter_threshold());
    }
  }
}

TEST(Io, CoocRejectsGarbage) {
  std::istringstream bad("not a header\n");
  EXPECT_THROW(load_cooc(bad), ParseError);
}

TEST(Io, SpaceRoundTrip) {
  const auto stats = testing::random_stats(12, 0.4, 30);
  for (const auto& space : {build_freq(stats), build_ppmi(stats), build_ppmi_is(stats)}) {
    std::stringstream buf;
    save_space(buf, space);
    EXPECT_EQ(load_space(buf), space);
  }
}

TEST(Io, EmbeddingRoundTripIsExact) {
  Embedding emb({"dog", "cat"}, 3, EmbeddingKind::kSgns);
  emb.word_vecs = {0.1, -1.0 / 3.0, 2e-300, 0.0, 12345.678, -7.0};
  std::stringstream buf;
  save_embedding(buf, emb);
  const auto back = load_embedding(buf);
  EXPECT_EQ(back.words, emb.words);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.kind, EmbeddingKind::kSgns);
  EXPECT_EQ(back.word_vecs, emb.word_vecs);
  std::istringstream bad("2 3 dive\ndog 1 2\n");
  EXPECT_THROW(load_embedding(bad), ParseError);
}

TEST(Io, FileErrors) {
  EXPECT_THROW(load_stopwords("/nonexistent/stop.txt"), IoError);
}

}  // namespace
}  // namespace dive
