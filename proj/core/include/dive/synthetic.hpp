#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dive/eval.hpp"

namespace dive {

// Generator for a corpus in which the distributional inclusion hypothesis
// holds by construction. Concepts form a random forest; every concept owns a
// few context words and its context set is its own words plus all of its
// children's sets. Concept chunks mention the concept and draw the remaining
// tokens uniformly from its context set; noise chunks draw from an unrelated
// vocabulary.
struct TaxonomyParams {
  std::size_t concepts = 200;
  std::size_t roots = 50;
  std::size_t max_children = 4;
  std::size_t max_depth = 4;
  std::size_t own_contexts = 12;
  std::size_t tokens = 1'000'000;
  std::size_t chunk_length = 100;
  // Probability that a token in a concept chunk is the concept itself.
  double mention_rate = 0.25;
  // Concept chunk frequency grows as |contexts|^exponent, so a hypernym is
  // mentioned more often per context than its hyponyms.
  double generality_exponent = 2.0;
  // Floor on chunks per concept so rare leaves still pass min_count.
  std::size_t min_chunks = 5;
  double noise_fraction = 0.7;
  // Kept small enough that chance noise pairs never pass a k_f = 30 filter.
  std::size_t noise_vocab = 5000;
  // Random-pair negatives per positive pair.
  double negatives_per_positive = 1.0;

  void validate() const;
};

struct SyntheticTaxonomy {
  std::string corpus;  // one chunk per line
  std::size_t token_count = 0;
  std::vector<std::string> concept_words;
  std::vector<std::int64_t> parent;  // -1 for roots
  std::vector<std::vector<std::string>> contexts;  // full context set per concept
  // (descendant, ancestor) concept index pairs.
  std::vector<std::pair<std::size_t, std::size_t>> planted;
  // Random (q, p) pairs where p is not an ancestor of q.
  std::vector<std::pair<std::size_t, std::size_t>> random_negatives;
  // Pairs of distinct concepts sharing a parent.
  std::vector<std::pair<std::size_t, std::size_t>> sibling_negatives;

  bool is_ancestor(std::size_t ancestor, std::size_t descendant) const;
  // Planted positives plus the selected negative kinds, as a detection dataset.
  Dataset dataset(bool with_random, bool with_siblings, const std::string& name = "synthetic") const;
  // Planted pairs with q and p swapped, all labelled positive.
  Dataset reversed_planted(const std::string& name = "synthetic_reversed") const;
};

SyntheticTaxonomy make_synthetic_taxonomy(std::uint64_t seed, const TaxonomyParams& params = {});

}  // namespace dive
