#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dive/corpus.hpp"

namespace dive {

enum class EmbeddingKind { kDive, kSgns };

std::string_view to_string(EmbeddingKind kind);
std::optional<EmbeddingKind> parse_embedding_kind(std::string_view name);

// Training hyperparameters with DIVE defaults. `negatives` (k') and
// `unigram_power` apply to SGNS only.
struct TrainHyper {
  std::size_t dim = 100;
  std::size_t epochs = 15;
  double learning_rate = 0.001;
  std::size_t batch_size = 128;
  double k_inclusion = 1.5;  // k_I
  double k_filter = 30.0;    // k_f the training stats were filtered with (recorded only)
  std::size_t negatives = 5;  // k'
  double unigram_power = 0.75;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Verify non-negativity and finiteness of every parameter touched by each
  // update. Slow; intended for tests.
  bool check_invariants = false;

  void validate() const;
};

// Dense |V| x L word and context matrices, row-major.
struct Embedding {
  std::vector<std::string> words;
  std::size_t dim = 0;
  EmbeddingKind kind = EmbeddingKind::kDive;
  std::vector<double> word_vecs;
  std::vector<double> ctx_vecs;
  TrainHyper hyper;

  Embedding() = default;
  Embedding(std::vector<std::string> words, std::size_t dim, EmbeddingKind kind);

  std::size_t vocab_size() const { return words.size(); }
  std::span<double> word(std::size_t i) { return {word_vecs.data() + i * dim, dim}; }
  std::span<const double> word(std::size_t i) const { return {word_vecs.data() + i * dim, dim}; }
  std::span<double> context(std::size_t i) { return {ctx_vecs.data() + i * dim, dim}; }
  std::span<const double> context(std::size_t i) const {
    return {ctx_vecs.data() + i * dim, dim};
  }
};

std::unordered_map<std::string, std::size_t> word_index(const Embedding& emb);

// Text format: header "<vocab_size> <L> <kind>", then "word v1 ... vL" per
// word with shortest round-trip decimals. Only word vectors are written;
// save_context_vectors writes the context matrix in the same layout.
void save_embedding(std::ostream& out, const Embedding& emb);
void save_context_vectors(std::ostream& out, const Embedding& emb);
Embedding load_embedding(std::istream& in, const std::string& source = "<embedding>");

}  // namespace dive
