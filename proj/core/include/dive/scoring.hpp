#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dive/embedding.hpp"
#include "dive/sbow.hpp"

namespace dive {

// Sparse vector with cached norms. Scorers assume non-negative values except
// for cosine, which SGNS vectors also go through.
class WordVector {
 public:
  WordVector() = default;
  explicit WordVector(std::vector<Feature> entries);
  static WordVector from_dense(std::span<const double> values);

  const std::vector<Feature>& entries() const { return entries_; }
  double norm1() const { return norm1_; }
  double norm2() const { return norm2_; }
  double sum() const { return sum_; }
  bool is_zero() const { return norm1_ == 0.0; }
  double at(std::uint32_t index) const;

 private:
  std::vector<Feature> entries_;
  double norm1_ = 0.0;
  double norm2_ = 0.0;
  double sum_ = 0.0;
};

// A WordVector rescaled to sum to one.
using ContextDistribution = std::vector<Feature>;
ContextDistribution normalize(const WordVector& v);

// Shannon entropy (natural log) of the normalized vector; nullopt for zero.
std::optional<double> entropy(const WordVector& v);

// Rows addressable by word, with per-row entropies cached for SLQS.
class VectorSpace {
 public:
  static VectorSpace from_features(const FeatureSpace& space);
  static VectorSpace from_embedding(const Embedding& emb);

  std::size_t size() const { return rows_.size(); }
  std::size_t dims() const { return dims_; }
  const std::string& word(std::size_t i) const { return words_[i]; }
  const WordVector& row(std::size_t i) const { return rows_[i]; }
  const WordVector* find(std::string_view word) const;
  // True when feature columns are words that also have rows (SBOW spaces).
  bool columns_are_words() const { return !context_row_.empty(); }
  // Row holding the given column's own vector, when columns are words.
  std::optional<std::size_t> context_row(std::uint32_t column) const;
  std::optional<double> row_entropy(std::size_t i) const;

 private:
  std::vector<std::string> words_;
  std::vector<WordVector> rows_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::int64_t> context_row_;
  std::vector<double> entropy_;  // NaN for zero rows
  std::size_t dims_ = 0;
};

// --- Scoring functions. Orientation is q -> p: p is the hypernym candidate.

// Cosine similarity; nullopt when either vector is zero.
std::optional<double> cosine(const WordVector& u, const WordVector& v);
// ||p||_1 - ||q||_1
double sum_diff(const WordVector& q, const WordVector& p);
// ||p||_2 - ||q||_2
double norm2_diff(const WordVector& q, const WordVector& p);
// H(p) - H(q) over normalized vectors (SLQS Row).
std::optional<double> entropy_diff(const WordVector& q, const WordVector& p);
// Median entropy of the rows of w's top_n contexts (by value, ties by id).
std::optional<double> median_top_context_entropy(const WordVector& w, const VectorSpace& space,
                                                 std::size_t top_n);
// E_p - E_q with E from median_top_context_entropy (SLQS Sub).
std::optional<double> slqs_sub(const WordVector& q, const WordVector& p, const VectorSpace& space,
                               std::size_t top_n = 100);
// ||min(p, q)||_1 / ||q||_1
std::optional<double> cde(const WordVector& q, const WordVector& p);
// sum of q[c] over supp(p), divided by ||q||_1
std::optional<double> weeds_precision(const WordVector& q, const WordVector& p);
// sqrt(cde(q,p) * (1 - cde(p,q)))
std::optional<double> invcl(const WordVector& q, const WordVector& p);
// Asymmetric L1 distance between the normalized vectors:
//   min_{a>=0} sum_c w0 max(a dq[c] - dp[c], 0) + max(dp[c] - a dq[c], 0),
// solved through its dual by funding contexts in increasing dp/dq order.
// Lower means more likely hypernym; rank on its negation.
std::optional<double> al1(const WordVector& q, const WordVector& p, double w0 = 5.0);

// Uniform in [0, 1), a deterministic function of (q, p, seed).
double random_score(std::string_view q, std::string_view p, std::uint64_t seed);

enum class ScorerKind {
  kCosine, kWord2Vec, kSumDiff, kNorm2Diff, kEntropyDiff, kSlqsSub, kCde, kWeeds, kInvCl, kAl1,
  kCdS, kCdQ, kCdE, kWdS, kWdQ, kWdE, kRandom
};

// Canonical names: cosine, word2vec, dS, dQ, dE, slqs_sub, cde, weeds, invcl,
// al1, CdS, CdQ, CdE, WdS, WdQ, WdE, random.
std::optional<ScorerKind> parse_scorer(std::string_view name);
std::string_view scorer_name(ScorerKind kind);
std::span<const ScorerKind> all_scorers();
bool needs_sgns(ScorerKind kind);
// dS, dQ, dE and slqs_sub measure generality alone.
bool is_generality(ScorerKind kind);

struct ScorerParams {
  double al1_w0 = 5.0;
  std::size_t slqs_top_n = 100;
  std::uint64_t random_seed = 0;
};

// A candidate pair resolved to vectors. Null or zero vectors mark OOV.
struct PairVectors {
  const WordVector* q = nullptr;
  const WordVector* p = nullptr;
  const WordVector* q_sgns = nullptr;
  const WordVector* p_sgns = nullptr;
  std::string_view q_text;
  std::string_view p_text;
};

// A named scoring function bound to its space(s). score() is higher when p is
// more likely a hypernym of q (AL1 is negated) and nullopt for OOV pairs.
class Scorer {
 public:
  Scorer(ScorerKind kind, const VectorSpace* space, const VectorSpace* sgns = nullptr,
         ScorerParams params = {});

  ScorerKind kind() const { return kind_; }
  std::optional<double> score(const PairVectors& pair) const;
  const VectorSpace* space() const { return space_; }
  const VectorSpace* sgns_space() const { return sgns_; }

 private:
  ScorerKind kind_;
  const VectorSpace* space_;
  const VectorSpace* sgns_;
  ScorerParams params_;
};

}  // namespace dive
