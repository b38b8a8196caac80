#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dive/cooccur.hpp"
#include "dive/embedding.hpp"
#include "dive/random.hpp"

namespace dive {

// Draws context ids with probability proportional to weight(c)^power using a
// cumulative table and binary search.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::uint64_t> weights, double power = 1.0);

  WordId sample(Rng& rng) const;
  double probability(WordId c) const { return prob_[c]; }
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<double> cumulative_;
};

// Pseudo-random bijection on [0, n): a keyed Feistel network with cycle
// walking. Lets an epoch visit every co-occurrence in shuffled order without
// materializing the |D|-long occurrence list.
class IndexPermutation {
 public:
  IndexPermutation(std::uint64_t n, std::uint64_t seed);
  std::uint64_t operator()(std::uint64_t i) const;
  std::uint64_t size() const { return n_; }

 private:
  std::uint64_t permute_once(std::uint64_t x) const;

  std::uint64_t n_;
  unsigned half_bits_;
  std::uint64_t half_mask_;
  std::uint64_t keys_[4];
};

struct EpochReport {
  std::size_t epoch = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  // Sum of sampled log-likelihood terms; an unbiased estimate of the
  // training objective at the parameters seen during the epoch.
  double objective_estimate = 0.0;
};

struct TrainResult {
  Embedding embedding;
  std::vector<EpochReport> epochs;
  // Negative samples drawn on behalf of each word, summed over all epochs.
  std::vector<std::uint64_t> negatives_per_word;
};

using ProgressCallback = std::function<void(const EpochReport&)>;

// DIVE: non-negative skip-gram with inclusion-shifted negative sampling.
// Expects PMI-filtered statistics. Each positive occurrence of word w draws
// k_I * Z / #(w) negatives in expectation (stochastic rounding) from the
// unsmoothed context distribution; updates use ADAM followed by projection
// onto the non-negative orthant.
TrainResult train_dive(const CoocStats& stats, const TrainHyper& hyper,
                       const ProgressCallback& progress = nullptr);

// Plain SGNS with k' negatives per positive from the unigram^0.75 distribution.
TrainResult train_sgns(const CoocStats& stats, const TrainHyper& hyper,
                       const ProgressCallback& progress = nullptr);

// Full-batch DIVE objective with the negative expectation summed exactly over
// P_D. Intended for small instances.
double objective_value(const Embedding& emb, const CoocStats& stats, double k_inclusion);

// Exact gradient of objective_value with respect to the word vector of w.
std::vector<double> full_gradient(const Embedding& emb, const CoocStats& stats,
                                  double k_inclusion, WordId w);

// One-sample estimate of full_gradient(w) built from the same per-occurrence
// update the trainer uses: draws one positive context of w in proportion to
// #(w,c) plus its negatives, and scales the word gradient by #(w).
std::vector<double> sampled_word_gradient(const Embedding& emb, const CoocStats& stats,
                                          double k_inclusion, WordId w, Rng& rng);

double log_sigmoid(double x);
double sigmoid(double x);

}  // namespace dive
