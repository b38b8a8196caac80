#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dive/scoring.hpp"

namespace dive {

enum class LabelMode { kAuto, kDetection, kGraded };

struct DatasetPair {
  std::string q_text;  // hyponym candidate as written
  std::string p_text;  // hypernym candidate as written
  std::vector<std::string> q;  // phrase members
  std::vector<std::string> p;
  double label = 0.0;  // 1/0 for detection, real score for graded data
};

// Splits each side into lowercased phrase members (POS suffixes untouched).
DatasetPair make_dataset_pair(std::string_view q, std::string_view p, double label = 0.0);

struct Dataset {
  std::string name;
  bool graded = false;
  std::vector<DatasetPair> pairs;
  std::size_t duplicates_dropped = 0;

  std::size_t positives() const;
};

// TSV with at least three columns: word1, word2, label (True/False/1/0 or a
// real number); further columns are ignored. Sides may be multi-word phrases.
// A first line whose label column does not parse is taken as a header.
// Later duplicates of a (q, p) pair are dropped.
Dataset load_dataset(std::istream& in, const std::string& name, LabelMode mode = LabelMode::kAuto);
Dataset load_dataset_file(const std::string& path, LabelMode mode = LabelMode::kAuto);

// Mean of the in-vocabulary members' vectors; nullopt when none is present.
std::optional<WordVector> compose_phrase(std::span<const std::string> words,
                                         const VectorSpace& space);

struct RankedPair {
  std::size_t index = 0;  // position in the dataset
  double score = 0.0;
  bool oov = false;
  double label = 0.0;
};

// Scored pairs by descending score (ties keep input order), then OOV pairs
// in input order.
using Ranking = std::vector<RankedPair>;

Ranking rank_pairs(const Dataset& dataset, const Scorer& scorer);
Ranking rank_scores(std::span<const std::optional<double>> scores, std::span<const double> labels);

// AP@all: mean over positives of precision at each positive's rank.
// Throws NumericError when there is no positive.
double average_precision(const Ranking& ranking);
double average_precision(std::span<const int> ranked_labels);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);
// Pearson correlation of average ranks. Throws NumericError for n < 2 or a
// constant input.
double spearman(std::span<const double> pred, std::span<const double> gold);
// Spearman over a ranking; OOV pairs tie below every numeric score.
double spearman(const Ranking& ranking);

// Fraction of (hyponym, hypernym) pairs whose score is > 0. OOV pairs are
// decided by a seeded coin flip. Only pairs with positive labels are used.
double directionality_accuracy(const Dataset& dataset, const Scorer& generality,
                               std::uint64_t seed);

struct DatasetResult {
  std::string dataset;
  std::string metric;  // "AP@all", "spearman" or "direction"
  double value = 0.0;
  std::size_t n = 0;
  std::size_t oov = 0;
};

// Sum(value_i * n_i) / Sum(n_i).
double micro_average(std::span<const DatasetResult> results);

struct EvalReport {
  std::string space;
  std::string scorer;
  std::vector<DatasetResult> results;

  // Micro-averaged AP over the detection datasets.
  std::optional<double> micro_average_ap() const;
};

// AP@all for detection datasets, Spearman for graded ones.
DatasetResult evaluate_dataset(const Dataset& dataset, const Scorer& scorer);

// "dataset=... metric=... value=... N=... OOV=..." lines plus a micro-average line.
void write_report_kv(std::ostream& out, const EvalReport& report);
// One row per (space, scorer), one column per dataset, micro-average last.
void write_report_table(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace dive
