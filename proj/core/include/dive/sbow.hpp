#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dive/cooccur.hpp"
#include "dive/embedding.hpp"

namespace dive {

enum class SpaceKind { kFreq, kPpmi, kPpmiIs, kFreqNmf };

std::string_view to_string(SpaceKind kind);
std::optional<SpaceKind> parse_space_kind(std::string_view name);

struct Feature {
  std::uint32_t index;
  double value;
  bool operator==(const Feature&) const = default;
};

// Sorted by index, strictly positive values only.
using SparseRow = std::vector<Feature>;

// Per-word sparse non-negative feature vectors. Columns are either context
// words (same order as the rows for spaces built from CoocStats) or K-means
// topic ids.
struct FeatureSpace {
  SpaceKind kind = SpaceKind::kFreq;
  std::vector<std::string> row_labels;
  std::vector<std::string> context_labels;
  std::vector<SparseRow> rows;

  std::size_t dims() const { return context_labels.size(); }
  // Throws InternalError when a row is unsorted, has a non-positive value or
  // an out-of-range index.
  void validate() const;
  bool operator==(const FeatureSpace&) const = default;
};

// Zeroes every #(w,c) with PMI(w,c) < log(k_f). Marginals and |D| are
// recomputed from the surviving pairs; Z keeps its unfiltered value.
CoocStats pmi_filter(const CoocStats& stats, double k_f);

FeatureSpace build_freq(const CoocStats& stats);
// max(PMI(w,c), 0)
FeatureSpace build_ppmi(const CoocStats& stats);
// PMI(w,c) + log(#(w) / (k_I Z)) = log(#(w,c) |D| / (k_I Z #(c))), the
// matrix DIVE factorizes; -inf when #(w,c) = 0.
double inclusion_shifted_pmi(const CoocStats& stats, WordId w, WordId c, double k_inclusion);

// max(log(#(w,c)|V| / #(c)), 0): the inclusion-shifted matrix with k_I = 1.
FeatureSpace build_ppmi_is(const CoocStats& stats);

struct KMeansOptions {
  std::size_t clusters = 100;
  std::size_t batch_size = 1024;
  std::size_t iterations = 100;
  std::uint64_t seed = 1;
  // Upper bound on points used for k-means++ seeding.
  std::size_t seeding_sample = 20000;
};

struct KMeansResult {
  std::size_t dim = 0;
  std::vector<double> centers;  // clusters x dim
  std::vector<std::uint32_t> assignment;
  std::size_t reseeded = 0;  // empty clusters reseeded from a random point
};

// Sculley-style mini-batch k-means over row-major points (n x dim) with
// k-means++ seeding. Clusters left empty after the final assignment are
// reseeded from a random point and the assignment repeated.
KMeansResult mini_batch_kmeans(std::span<const double> points, std::size_t dim,
                               const KMeansOptions& options);

// rows[w][k] = sum of #(w,c) over contexts c assigned to cluster k.
FeatureSpace hash_by_cluster(const CoocStats& stats, std::span<const std::uint32_t> assignment,
                             std::size_t clusters);

// K-means Freq-NMF baseline: cluster context words in skip-gram space, then
// fold SBOW frequencies into their clusters.
FeatureSpace kmeans_freq_nmf(const Embedding& skipgram, const CoocStats& stats,
                             const KMeansOptions& options);

// Sparse TSV: '#'-prefixed header (kind, row and context labels) then
// "word<TAB>context<TAB>value" triples.
void save_space(std::ostream& out, const FeatureSpace& space);
FeatureSpace load_space(std::istream& in, const std::string& source = "<space>");

}  // namespace dive
