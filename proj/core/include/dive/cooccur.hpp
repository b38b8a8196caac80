#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dive/corpus.hpp"

namespace dive {

// Context window around each target position, truncated at chunk boundaries.
struct Window {
  std::uint32_t left = 10;
  std::uint32_t right = 10;

  // Splits an even total window size half left, half right.
  static Window symmetric(std::uint32_t total);
  std::uint32_t size() const { return left + right; }
  bool operator==(const Window&) const = default;
};

struct CoocEntry {
  WordId context;
  std::uint64_t count;
  bool operator==(const CoocEntry&) const = default;
};

// Sparse word-by-context counts #(w,c) with their marginals.
//
// Rows are stored CSR-style, sorted by context id. Marginals, the grand total
// |D| and the average frequency Z are derived from the stored counts, except
// that a PMI-filtered copy keeps the Z of the unfiltered corpus.
class CoocStats {
 public:
  CoocStats() = default;

  // `rows[w]` lists (context, count) pairs for word w; zero counts are dropped
  // and rows are sorted. Z defaults to |D|/|V| when avg_freq is negative.
  CoocStats(std::vector<std::string> words, Window window,
            std::vector<std::vector<CoocEntry>> rows, double avg_freq = -1.0,
            double filter_threshold = 0.0);

  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  Window window() const { return window_; }

  std::span<const CoocEntry> row(WordId w) const {
    return {entries_.data() + offsets_[w], entries_.data() + offsets_[w + 1]};
  }
  std::uint64_t count(WordId w, WordId c) const;
  std::uint64_t word_marginal(WordId w) const { return word_marginal_[w]; }
  std::uint64_t context_marginal(WordId c) const { return context_marginal_[c]; }
  const std::vector<std::uint64_t>& word_marginals() const { return word_marginal_; }
  const std::vector<std::uint64_t>& context_marginals() const { return context_marginal_; }
  std::uint64_t total() const { return total_; }
  double avg_freq() const { return avg_freq_; }
  std::size_t nonzeros() const { return entries_.size(); }
  // k_f used to build this object; 0 when unfiltered.
  double filter_threshold() const { return filter_threshold_; }

  std::vector<std::vector<CoocEntry>> to_rows() const;

  bool operator==(const CoocStats& other) const;

 private:
  std::vector<std::string> words_;
  Window window_;
  std::vector<std::size_t> offsets_{0};
  std::vector<CoocEntry> entries_;
  std::vector<std::uint64_t> word_marginal_;
  std::vector<std::uint64_t> context_marginal_;
  std::uint64_t total_ = 0;
  double avg_freq_ = 0.0;
  double filter_threshold_ = 0.0;
};

// Accumulates windowed pair counts chunk by chunk. Counters built over
// disjoint chunk partitions merge into exactly the single-pass result.
class CoocCounter {
 public:
  CoocCounter(std::size_t vocab_size, Window window);

  void add_chunk(std::span<const WordId> chunk);
  void merge(const CoocCounter& other);
  CoocStats finish(std::vector<std::string> words) const;

 private:
  std::size_t vocab_size_;
  Window window_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
};

// Counts co-occurrences with `threads` workers over contiguous chunk ranges.
CoocStats count_cooccurrences(const EncodedCorpus& corpus, const Vocabulary& vocab,
                              Window window, unsigned threads = 1);

// Natural-log PMI; -infinity when #(w,c) = 0.
double pmi(const CoocStats& stats, WordId w, WordId c);
double pmi_from_counts(std::uint64_t pair, std::uint64_t word, std::uint64_t context,
                       std::uint64_t total);

// TSV persistence: '#'-prefixed header (vocabulary, window, |V|, |D|, Z) then
// "word<TAB>context<TAB>count" triples.
void save_cooc(std::ostream& out, const CoocStats& stats);
CoocStats load_cooc(std::istream& in, const std::string& source = "<cooc>");

}  // namespace dive
