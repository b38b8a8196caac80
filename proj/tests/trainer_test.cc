#include "dive/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dive/error.hpp"
#include "test_util.hpp"

namespace dive {
namespace {

Embedding random_embedding(const CoocStats& st, std::size_t dim, double lo, double hi) {
  Embedding emb(st.words(), dim, EmbeddingKind::kDive);
  for (auto& x : emb.word_vecs) x = testing::uniform_real(lo, hi);
  for (auto& x : emb.ctx_vecs) x = testing::uniform_real(lo, hi);
  return emb;
}

double dotp(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Direct transcription of the objective: positive term plus the negative
// expectation weighted by k_I (Z / #(w)) #(w,c).
double objective_oracle(const Embedding& emb, const CoocStats& st, double k) {
  const double z = static_cast<double>(st.total()) / static_cast<double>(st.vocab_size());
  double total = 0;
  for (WordId w = 0; w < st.vocab_size(); ++w) {
    for (const auto& e : st.row(w)) {
      const double n = static_cast<double>(e.count);
      total += n * std::log(1.0 / (1.0 + std::exp(-dotp(emb.word(w), emb.context(e.context)))));
      double neg = 0;
      for (WordId cn = 0; cn < st.vocab_size(); ++cn) {
        const double pd = static_cast<double>(st.context_marginal(cn)) / static_cast<double>(st.total());
        neg += pd * std::log(1.0 / (1.0 + std::exp(dotp(emb.word(w), emb.context(cn)))));
      }
      total += k * (z / static_cast<double>(st.word_marginal(w))) * n * neg;
    }
  }
  return total;
}

CoocStats dense_stats(std::size_t n) {
  CoocStats st;
  do {
    st = testing::random_stats(n, 0.6, 15);
  } while ([&] {
    for (WordId w = 0; w < n; ++w) {
      if (st.word_marginal(w) == 0) return true;
    }
    return false;
  }());
  return st;
}

TrainHyper small_hyper() {
  TrainHyper h;
  h.dim = 6;
  h.epochs = 3;
  h.batch_size = 16;
  h.learning_rate = 0.01;
  h.seed = 42;
  return h;
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(log_sigmoid(0.0), std::log(0.5));
  EXPECT_TRUE(std::isfinite(log_sigmoid(-800.0)));
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_EQ(log_sigmoid(800.0), 0.0);
  EXPECT_NEAR(sigmoid(3.0) + sigmoid(-3.0), 1.0, 1e-15);
}

TEST(Objective, AllZeroEmbedding) {
  const auto st = dense_stats(8);
  Embedding emb(st.words(), 4, EmbeddingKind::kDive);
  const double k = 1.5;
  const double expected = (static_cast<double>(st.total()) + k * st.avg_freq() * 8.0) * std::log(0.5);
  EXPECT_NEAR(objective_value(emb, st, k), expected, 1e-9 * std::abs(expected));
}

TEST(Objective, SaturatesWithoutNegatives) {
  std::vector<std::vector<CoocEntry>> rows{{{1, 1}}, {}};
  const CoocStats st({"a", "b"}, Window{1, 1}, rows);
  Embedding emb(st.words(), 1, EmbeddingKind::kDive);
  double prev = -1.0;
  for (double x : {1.0, 2.0, 3.0, 4.0}) {
    emb.word_vecs[0] = x;
    emb.ctx_vecs[1] = x;
    const double v = objective_value(emb, st, 0.0);
    EXPECT_LT(v, 0.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, -1e-6);
}

TEST(Objective, MatchesDirectSummation) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = dense_stats(testing::uniform_int(2, 9));
    const auto emb = random_embedding(st, testing::uniform_int(1, 6), 0.0, 0.8);
    const double k = testing::uniform_real(0.0, 3.0);
    const double a = objective_value(emb, st, k);
    const double b = objective_oracle(emb, st, k);
    EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
  }
}

TEST(Gradient, ZeroContextsGiveZero) {
  const auto st = dense_stats(6);
  auto emb = random_embedding(st, 3, 0.0, 1.0);
  std::fill(emb.ctx_vecs.begin(), emb.ctx_vecs.end(), 0.0);
  for (WordId w = 0; w < 6; ++w) {
    for (double g : full_gradient(emb, st, 1.5, w)) EXPECT_EQ(g, 0.0);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (int trial = 0; trial < 10; ++trial) {
    const auto st = dense_stats(10);
    auto emb = random_embedding(st, 5, 0.0, 0.6);
    const double h = 1e-5;
    for (WordId w = 0; w < 10; ++w) {
      const auto g = full_gradient(emb, st, 1.5, w);
      for (std::size_t i = 0; i < 5; ++i) {
        double& x = emb.word_vecs[w * 5 + i];
        const double orig = x;
        x = orig + h;
        const double up = objective_value(emb, st, 1.5);
        x = orig - h;
        const double down = objective_value(emb, st, 1.5);
        x = orig;
        const double fd = (up - down) / (2 * h);
        EXPECT_LE(std::abs(g[i] - fd), 1e-4 * std::max(std::abs(g[i]), std::abs(fd)))
            << "w=" << w << " i=" << i << " g=" << g[i] << " fd=" << fd;
      }
    }
  }
}

TEST(Gradient, MoreCountsMeansLargerGradient) {
  // y shares x's embedding and dominates x's counts in every context
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = testing::uniform_int(3, 10);
    std::vector<std::vector<CoocEntry>> rows(n);
    for (WordId c = 0; c < n; ++c) {
      const auto cx = testing::uniform_int(0, 5);
      const auto cy = cx + testing::uniform_int(0, 5);
      if (cx) rows[0].push_back({c, cx});
      if (cy) rows[1].push_back({c, cy});
      for (WordId w = 2; w < n; ++w) rows[w].push_back({c, testing::uniform_int(1, 4)});
    }
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
    const CoocStats st(words, Window{1, 1}, rows);
    auto emb = random_embedding(st, 4, 0.0, 1.0);
    std::copy(emb.word(0).begin(), emb.word(0).end(), emb.word(1).begin());
    const auto gx = full_gradient(emb, st, 1.5, 0);
    const auto gy = full_gradient(emb, st, 1.5, 1);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_GE(gy[i], gx[i] - 1e-12);
  }
}

TEST(Gradient, SampledUpdateIsUnbiased) {
  const auto st = dense_stats(10);
  const auto emb = random_embedding(st, 5, 0.0, 0.6);
  Rng rng(9);
  const int samples = 100000;
  for (WordId w : {WordId{0}, WordId{4}, WordId{9}}) {
    const auto exact = full_gradient(emb, st, 1.5, w);
    std::vector<double> sum(5, 0.0), sq(5, 0.0);
    for (int s = 0; s < samples; ++s) {
      const auto g = sampled_word_gradient(emb, st, 1.5, w, rng);
      for (std::size_t i = 0; i < 5; ++i) {
        sum[i] += g[i];
        sq[i] += g[i] * g[i];
      }
    }
    for (std::size_t i = 0; i < 5; ++i) {
      const double mean = sum[i] / samples;
      const double var = sq[i] / samples - mean * mean;
      const double se = std::sqrt(var / samples);
      EXPECT_LE(std::abs(mean - exact[i]), 3 * se + 1e-12)
          << "w=" << w << " i=" << i << " mean=" << mean << " exact=" << exact[i];
    }
  }
}

TEST(NegativeSampler, Distribution) {
  const std::vector<std::uint64_t> weights{5, 0, 1, 4};
  const NegativeSampler s(weights);
  EXPECT_DOUBLE_EQ(s.probability(0) + s.probability(1) + s.probability(2) + s.probability(3), 1.0);
  EXPECT_DOUBLE_EQ(s.probability(0), 0.5);
  EXPECT_EQ(s.probability(1), 0.0);
  Rng rng(3);
  std::vector<int> hits(4, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++hits[s.sample(rng)];
  EXPECT_EQ(hits[1], 0);
  for (WordId c : {0u, 2u, 3u}) {
    const double p = s.probability(c);
    EXPECT_NEAR(hits[c], p * n, 4 * std::sqrt(n * p * (1 - p)));
  }
  const NegativeSampler smooth(weights, 0.75);
  EXPECT_NEAR(smooth.probability(0) / smooth.probability(3), std::pow(5.0 / 4.0, 0.75), 1e-12);
  EXPECT_THROW(NegativeSampler(std::vector<std::uint64_t>{0, 0}), ConfigError);
}

TEST(IndexPermutation, IsBijection) {
  for (std::uint64_t n : {1ull, 2ull, 3ull, 7ull, 64ull, 1000ull, 4097ull}) {
    const IndexPermutation p(n, n * 31);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto x = p(i);
      ASSERT_LT(x, n);
      seen.insert(x);
    }
    EXPECT_EQ(seen.size(), n);
  }
  const IndexPermutation a(1000, 1), b(1000, 2);
  int same = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) same += a(i) == b(i);
  EXPECT_LT(same, 20);
}

TEST(TrainDive, NonNegativeAfterEveryUpdate) {
  const auto st = dense_stats(20);
  auto h = small_hyper();
  h.check_invariants = true;
  h.learning_rate = 0.05;  // large steps push many entries across zero
  const auto r = train_dive(st, h);
  for (double x : r.embedding.word_vecs) EXPECT_GE(x, 0.0);
  for (double x : r.embedding.ctx_vecs) EXPECT_GE(x, 0.0);
  EXPECT_EQ(r.embedding.kind, EmbeddingKind::kDive);
  EXPECT_EQ(r.epochs.size(), h.epochs);
  for (const auto& e : r.epochs) EXPECT_EQ(e.positives, st.total());
}

TEST(TrainDive, Deterministic) {
  const auto st = dense_stats(15);
  const auto h = small_hyper();
  const auto a = train_dive(st, h);
  const auto b = train_dive(st, h);
  EXPECT_EQ(a.embedding.word_vecs, b.embedding.word_vecs);
  EXPECT_EQ(a.embedding.ctx_vecs, b.embedding.ctx_vecs);
  std::ostringstream sa, sb;
  save_embedding(sa, a.embedding);
  save_embedding(sb, b.embedding);
  EXPECT_EQ(sa.str(), sb.str());
  auto h2 = h;
  h2.seed = 43;
  EXPECT_NE(train_dive(st, h2).embedding.word_vecs, a.embedding.word_vecs);
}

TEST(TrainDive, NegativeMassPerWord) {
  const auto st = dense_stats(12);
  auto h = small_hyper();
  h.epochs = 1;
  const auto r = train_dive(st, h);
  for (WordId w = 0; w < 12; ++w) {
    const double p = h.k_inclusion * st.avg_freq() / static_cast<double>(st.word_marginal(w));
    const double frac = p - std::floor(p);
    const double sd = std::sqrt(static_cast<double>(st.word_marginal(w)) * frac * (1 - frac));
    EXPECT_LE(std::abs(static_cast<double>(r.negatives_per_word[w]) - h.k_inclusion * st.avg_freq()),
              3 * sd + 1e-6)
        << "w=" << w;
  }
}

TEST(TrainDive, ObjectiveImproves) {
  const auto st = dense_stats(20);
  auto h = small_hyper();
  h.epochs = 1;
  const auto before = objective_value(train_dive(st, h).embedding, st, h.k_inclusion);
  h.epochs = 30;
  const auto after = objective_value(train_dive(st, h).embedding, st, h.k_inclusion);
  EXPECT_GT(after, before);
}

TEST(TrainDive, ParallelKeepsInvariants) {
  const auto st = dense_stats(30);
  auto h = small_hyper();
  h.threads = 4;
  h.check_invariants = true;
  const auto r = train_dive(st, h);
  for (double x : r.embedding.word_vecs) {
    EXPECT_GE(x, 0.0);
    EXPECT_TRUE(std::isfinite(x));
  }
  std::uint64_t positives = 0;
  for (const auto& e : r.epochs) positives += e.positives;
  EXPECT_EQ(positives, h.epochs * st.total());
}

TEST(TrainDive, RejectsBadHyper) {
  const auto st = dense_stats(5);
  for (auto mutate : std::vector<void (*)(TrainHyper&)>{
           [](TrainHyper& h) { h.dim = 0; }, [](TrainHyper& h) { h.epochs = 0; },
           [](TrainHyper& h) { h.learning_rate = 0; }, [](TrainHyper& h) { h.learning_rate = -1; },
           [](TrainHyper& h) { h.batch_size = 0; }}) {
    auto h = small_hyper();
    mutate(h);
    EXPECT_THROW(train_dive(st, h), ConfigError);
  }
  EXPECT_THROW(train_dive(CoocStats({"a"}, Window{1, 1}, {{}}), small_hyper()), ConfigError);
}

TEST(TrainDive, DivergenceIsReported) {
  const auto st = dense_stats(10);
  auto h = small_hyper();
  h.learning_rate = 1e308;
  EXPECT_THROW(train_dive(st, h), NumericError);
}

TEST(TrainSgns, UnconstrainedWithFixedNegatives) {
  const auto st = dense_stats(20);
  auto h = small_hyper();
  h.learning_rate = 0.05;
  const auto r = train_sgns(st, h);
  EXPECT_EQ(r.embedding.kind, EmbeddingKind::kSgns);
  bool negative = false;
  for (double x : r.embedding.word_vecs) negative |= x < 0.0;
  EXPECT_TRUE(negative);
  for (const auto& e : r.epochs) EXPECT_EQ(e.negatives, h.negatives * st.total());
}

}  // namespace
}  // namespace dive
