#include "dive/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <string>
#include <thread>

#include "dive/error.hpp"

namespace dive {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Parameter access for the single-threaded path.
struct PlainAccess {
  static void load(const double* src, double* dst, std::size_t n) {
    std::memcpy(dst, src, n * sizeof(double));
  }
  static double get(double& x) { return x; }
  static void set(double& x, double v) { x = v; }
  static std::uint32_t bump(std::uint32_t& t) { return ++t; }
};

// Parameter access for lock-free concurrent training: relaxed atomics make
// the races benign without ordering cost.
struct SharedAccess {
  static void load(const double* src, double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = std::atomic_ref<double>(const_cast<double&>(src[i])).load(std::memory_order_relaxed);
    }
  }
  static double get(double& x) { return std::atomic_ref<double>(x).load(std::memory_order_relaxed); }
  static void set(double& x, double v) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
  static std::uint32_t bump(std::uint32_t& t) {
    return std::atomic_ref<std::uint32_t>(t).fetch_add(1, std::memory_order_relaxed) + 1;
  }
};

// Sparse accumulator of per-row gradients within one batch.
class GradBuffer {
 public:
  GradBuffer(std::size_t rows, std::size_t dim) : dim_(dim), slot_(rows, -1) {}

  double* row(WordId r) {
    if (slot_[r] < 0) {
      slot_[r] = static_cast<std::int64_t>(touched_.size());
      touched_.push_back(r);
      grads_.resize(grads_.size() + dim_, 0.0);
    }
    return grads_.data() + static_cast<std::size_t>(slot_[r]) * dim_;
  }
  const std::vector<WordId>& touched() const { return touched_; }
  const double* grad(std::size_t slot) const { return grads_.data() + slot * dim_; }
  void clear() {
    for (auto r : touched_) slot_[r] = -1;
    touched_.clear();
    grads_.clear();
  }

 private:
  std::size_t dim_;
  std::vector<std::int64_t> slot_;
  std::vector<WordId> touched_;
  std::vector<double> grads_;
};

// How many negatives a positive occurrence of w draws.
struct NegativePolicy {
  bool inclusion_shift = true;
  double k = 1.5;  // k_I for DIVE, k' for SGNS
  double avg_freq = 0.0;
  std::span<const std::uint64_t> word_marginals;

  std::uint32_t draws(WordId w, Rng& rng) const {
    if (!inclusion_shift) return static_cast<std::uint32_t>(k);
    const double p = k * avg_freq / static_cast<double>(word_marginals[w]);
    const double whole = std::floor(p);
    return static_cast<std::uint32_t>(whole) + (rng.bernoulli(p - whole) ? 1u : 0u);
  }
};

struct Scratch {
  explicit Scratch(std::size_t dim) : w(dim), c(dim) {}
  std::vector<double> w;
  std::vector<double> c;
};

struct OccurrenceStats {
  std::uint32_t negatives = 0;
  double log_likelihood = 0.0;
};

// Accumulates the gradient of one positive occurrence (w, c) and its sampled
// negatives into the word and context buffers.
template <typename Access>
OccurrenceStats accumulate_occurrence(const Embedding& emb, WordId w, WordId c,
                                      const NegativePolicy& policy,
                                      const NegativeSampler& sampler, Rng& rng, GradBuffer& gw,
                                      GradBuffer* gc, Scratch& scratch) {
  const std::size_t dim = emb.dim;
  OccurrenceStats out;
  Access::load(emb.word_vecs.data() + w * dim, scratch.w.data(), dim);
  Access::load(emb.ctx_vecs.data() + c * dim, scratch.c.data(), dim);
  double s = dot(scratch.w.data(), scratch.c.data(), dim);
  out.log_likelihood += log_sigmoid(s);
  double g = 1.0 - sigmoid(s);
  axpy(g, scratch.c.data(), gw.row(w), dim);
  if (gc) axpy(g, scratch.w.data(), gc->row(c), dim);

  out.negatives = policy.draws(w, rng);
  for (std::uint32_t k = 0; k < out.negatives; ++k) {
    const WordId cn = sampler.sample(rng);
    Access::load(emb.ctx_vecs.data() + cn * dim, scratch.c.data(), dim);
    s = dot(scratch.w.data(), scratch.c.data(), dim);
    out.log_likelihood += log_sigmoid(-s);
    g = -sigmoid(s);
    axpy(g, scratch.c.data(), gw.row(w), dim);
    if (gc) axpy(g, scratch.w.data(), gc->row(cn), dim);
  }
  return out;
}

struct AdamState {
  AdamState(std::size_t rows, std::size_t dim) : m(rows * dim, 0.0), v(rows * dim, 0.0), t(rows, 0) {}
  std::vector<double> m;
  std::vector<double> v;
  std::vector<std::uint32_t> t;
};

// One ADAM ascent step on every row touched in the batch. Moments of
// untouched rows are left alone.
template <typename Access>
void apply_adam(std::vector<double>& params, AdamState& state, const GradBuffer& grads,
                std::size_t dim, double lr, bool project, bool check, const char* matrix) {
  const auto& rows = grads.touched();
  for (std::size_t slot = 0; slot < rows.size(); ++slot) {
    const WordId r = rows[slot];
    const std::uint32_t t = Access::bump(state.t[r]);
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    const double* g = grads.grad(slot);
    double* theta = params.data() + r * dim;
    double* m = state.m.data() + r * dim;
    double* v = state.v.data() + r * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      const double mi = kBeta1 * Access::get(m[i]) + (1.0 - kBeta1) * g[i];
      const double vi = kBeta2 * Access::get(v[i]) + (1.0 - kBeta2) * g[i] * g[i];
      Access::set(m[i], mi);
      Access::set(v[i], vi);
      double x = Access::get(theta[i]) + lr * (mi / bc1) / (std::sqrt(vi / bc2) + kAdamEps);
      if (project && x < 0.0) x = 0.0;
      if (!std::isfinite(x)) {
        throw NumericError(std::string("non-finite parameter in ") + matrix + " row " +
                           std::to_string(r) + " (learning rate too large?)");
      }
      Access::set(theta[i], x);
    }
    if (check) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double x = Access::get(theta[i]);
        if (!std::isfinite(x) || (project && x < 0.0)) {
          throw InternalError(std::string("invariant violated after update in ") + matrix +
                              " row " + std::to_string(r));
        }
      }
    }
  }
}

// Maps an occurrence index in [0, |D|) to its (word, context) pair.
class OccurrenceIndex {
 public:
  explicit OccurrenceIndex(const CoocStats& stats) {
    cumulative_.reserve(stats.nonzeros() + 1);
    cumulative_.push_back(0);
    words_.reserve(stats.nonzeros());
    contexts_.reserve(stats.nonzeros());
    for (WordId w = 0; w < stats.vocab_size(); ++w) {
      for (const auto& e : stats.row(w)) {
        cumulative_.push_back(cumulative_.back() + e.count);
        words_.push_back(w);
        contexts_.push_back(e.context);
      }
    }
  }
  std::uint64_t total() const { return cumulative_.back(); }
  std::pair<WordId, WordId> locate(std::uint64_t occ) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), occ);
    const auto e = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    return {words_[e], contexts_[e]};
  }

 private:
  std::vector<std::uint64_t> cumulative_;
  std::vector<WordId> words_;
  std::vector<WordId> contexts_;
};

struct WorkerState {
  WorkerState(std::size_t rows, std::size_t dim, std::uint64_t seed)
      : rng(seed), gw(rows, dim), gc(rows, dim), scratch(dim), negatives_per_word(rows, 0) {}
  Rng rng;
  GradBuffer gw;
  GradBuffer gc;
  Scratch scratch;
  std::vector<std::uint64_t> negatives_per_word;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  double objective = 0.0;
};

template <typename Access>
void run_batch(Embedding& emb, AdamState& word_state, AdamState& ctx_state,
               const OccurrenceIndex& occurrences, const IndexPermutation& perm,
               std::uint64_t begin, std::uint64_t end, const NegativePolicy& policy,
               const NegativeSampler& sampler, const TrainHyper& hyper, bool project,
               WorkerState& ws) {
  for (std::uint64_t i = begin; i < end; ++i) {
    const auto [w, c] = occurrences.locate(perm(i));
    const auto occ = accumulate_occurrence<Access>(emb, w, c, policy, sampler, ws.rng, ws.gw,
                                                   &ws.gc, ws.scratch);
    ws.negatives_per_word[w] += occ.negatives;
    ws.negatives += occ.negatives;
    ws.objective += occ.log_likelihood;
    ++ws.positives;
  }
  apply_adam<Access>(emb.word_vecs, word_state, ws.gw, emb.dim, hyper.learning_rate, project,
                     hyper.check_invariants, "word");
  apply_adam<Access>(emb.ctx_vecs, ctx_state, ws.gc, emb.dim, hyper.learning_rate, project,
                     hyper.check_invariants, "context");
  ws.gw.clear();
  ws.gc.clear();
}

TrainResult train(const CoocStats& stats, const TrainHyper& hyper, bool dive,
                  const ProgressCallback& progress) {
  hyper.validate();
  const std::size_t v = stats.vocab_size();
  if (v == 0) throw ConfigError("cannot train on an empty vocabulary");
  if (stats.total() == 0) throw ConfigError("co-occurrence statistics are empty");

  TrainResult result;
  Embedding& emb = result.embedding;
  emb = Embedding(stats.words(), hyper.dim, dive ? EmbeddingKind::kDive : EmbeddingKind::kSgns);
  emb.hyper = hyper;
  {
    Rng init(splitmix64(hyper.seed ^ 0x5EEDull));
    const double dim = static_cast<double>(hyper.dim);
    const double lo = dive ? 0.0 : -0.5 / dim;
    const double hi = dive ? 0.5 / std::sqrt(dim) : 0.5 / dim;
    for (auto& x : emb.word_vecs) x = init.uniform(lo, hi);
    for (auto& x : emb.ctx_vecs) x = init.uniform(lo, hi);
  }

  NegativePolicy policy;
  policy.inclusion_shift = dive;
  policy.k = dive ? hyper.k_inclusion : static_cast<double>(hyper.negatives);
  policy.avg_freq = stats.avg_freq();
  policy.word_marginals = stats.word_marginals();
  const NegativeSampler sampler(stats.context_marginals(), dive ? 1.0 : hyper.unigram_power);

  const OccurrenceIndex occurrences(stats);
  AdamState word_state(v, hyper.dim);
  AdamState ctx_state(v, hyper.dim);
  const unsigned threads = std::max(1u, hyper.threads);
  std::vector<WorkerState> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back(v, hyper.dim, splitmix64(hyper.seed + 0x9E37ull * (t + 1)));
  }

  const std::uint64_t total = occurrences.total();
  const std::uint64_t batch = hyper.batch_size;
  const std::uint64_t n_batches = (total + batch - 1) / batch;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const IndexPermutation perm(total, splitmix64(hyper.seed * 0x2545F491ull + epoch));
    for (auto& ws : workers) ws.positives = ws.negatives = 0, ws.objective = 0.0;

    if (threads == 1) {
      auto& ws = workers.front();
      for (std::uint64_t b = 0; b < n_batches; ++b) {
        run_batch<PlainAccess>(emb, word_state, ctx_state, occurrences, perm, b * batch,
                               std::min(total, (b + 1) * batch), policy, sampler, hyper, dive, ws);
      }
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr failure;
      std::atomic<bool> failed{false};
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::uint64_t b = t; b < n_batches && !failed.load(); b += threads) {
              run_batch<SharedAccess>(emb, word_state, ctx_state, occurrences, perm, b * batch,
                                      std::min(total, (b + 1) * batch), policy, sampler, hyper,
                                      dive, workers[t]);
            }
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (failure) std::rethrow_exception(failure);
    }

    EpochReport report;
    report.epoch = epoch + 1;
    for (const auto& ws : workers) {
      report.positives += ws.positives;
      report.negatives += ws.negatives;
      report.objective_estimate += ws.objective;
    }
    if (!std::isfinite(report.objective_estimate)) {
      throw NumericError("objective estimate became non-finite in epoch " +
                         std::to_string(epoch + 1));
    }
    result.epochs.push_back(report);
    if (progress) progress(report);
  }

  result.negatives_per_word.assign(v, 0);
  for (const auto& ws : workers) {
    for (std::size_t i = 0; i < v; ++i) result.negatives_per_word[i] += ws.negatives_per_word[i];
  }
  return result;
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

void TrainHyper::validate() const {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  if (epochs == 0) throw ConfigError("number of epochs must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(k_inclusion >= 0.0) || !std::isfinite(k_inclusion)) {
    throw ConfigError("k_I must be non-negative");
  }
  if (!(unigram_power >= 0.0)) throw ConfigError("unigram power must be non-negative");
}

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> weights, double power) {
  prob_.resize(weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    prob_[i] = weights[i] == 0 ? 0.0 : std::pow(static_cast<double>(weights[i]), power);
    sum += prob_[i];
  }
  if (!(sum > 0.0)) throw ConfigError("negative sampling distribution has no mass");
  cumulative_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    prob_[i] /= sum;
    acc += prob_[i];
    cumulative_[i] = acc;
  }
  // Guard against rounding leaving the last bucket short of 1.
  for (std::size_t i = prob_.size(); i-- > 0;) {
    if (prob_[i] > 0.0) {
      for (std::size_t j = i; j < prob_.size(); ++j) cumulative_[j] = 1.0;
      break;
    }
  }
}

WordId NegativeSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<WordId>(it - cumulative_.begin());
}

IndexPermutation::IndexPermutation(std::uint64_t n, std::uint64_t seed) : n_(n) {
  unsigned bits = n <= 1 ? 2 : static_cast<unsigned>(std::bit_width(n - 1));
  if (bits % 2) ++bits;
  if (bits < 2) bits = 2;
  half_bits_ = bits / 2;
  half_mask_ = (std::uint64_t{1} << half_bits_) - 1;
  std::uint64_t s = seed;
  for (auto& k : keys_) k = s = splitmix64(s);
}

std::uint64_t IndexPermutation::permute_once(std::uint64_t x) const {
  std::uint64_t left = x >> half_bits_;
  std::uint64_t right = x & half_mask_;
  for (auto key : keys_) {
    const std::uint64_t f = splitmix64(right ^ key) & half_mask_;
    const std::uint64_t next = left ^ f;
    left = right;
    right = next;
  }
  return (left << half_bits_) | right;
}

std::uint64_t IndexPermutation::operator()(std::uint64_t i) const {
  // Cycle walking keeps the bijection inside [0, n).
  std::uint64_t x = permute_once(i);
  while (x >= n_) x = permute_once(x);
  return x;
}

TrainResult train_dive(const CoocStats& stats, const TrainHyper& hyper,
                       const ProgressCallback& progress) {
  return train(stats, hyper, true, progress);
}

TrainResult train_sgns(const CoocStats& stats, const TrainHyper& hyper,
                       const ProgressCallback& progress) {
  return train(stats, hyper, false, progress);
}

double objective_value(const Embedding& emb, const CoocStats& stats, double k_inclusion) {
  const std::size_t dim = emb.dim;
  const double total = static_cast<double>(stats.total());
  const double z = stats.avg_freq();
  double value = 0.0;
  for (WordId w = 0; w < stats.vocab_size(); ++w) {
    const double* wv = emb.word_vecs.data() + w * dim;
    for (const auto& e : stats.row(w)) {
      value += static_cast<double>(e.count) *
               log_sigmoid(dot(wv, emb.ctx_vecs.data() + e.context * dim, dim));
    }
    if (stats.word_marginal(w) == 0 || k_inclusion == 0.0) continue;
    // (Z/#(w)) * sum_c #(w,c) = Z, so each word carries k_I * Z expected negatives.
    double expectation = 0.0;
    for (WordId cn = 0; cn < stats.vocab_size(); ++cn) {
      const auto mass = stats.context_marginal(cn);
      if (mass == 0) continue;
      expectation += (static_cast<double>(mass) / total) *
                     log_sigmoid(-dot(wv, emb.ctx_vecs.data() + cn * dim, dim));
    }
    value += k_inclusion * z * expectation;
  }
  return value;
}

std::vector<double> full_gradient(const Embedding& emb, const CoocStats& stats,
                                  double k_inclusion, WordId w) {
  const std::size_t dim = emb.dim;
  std::vector<double> grad(dim, 0.0);
  const double* wv = emb.word_vecs.data() + w * dim;
  for (const auto& e : stats.row(w)) {
    const double* cv = emb.ctx_vecs.data() + e.context * dim;
    axpy(static_cast<double>(e.count) * (1.0 - sigmoid(dot(wv, cv, dim))), cv, grad.data(), dim);
  }
  if (stats.word_marginal(w) == 0 || k_inclusion == 0.0) return grad;
  const double total = static_cast<double>(stats.total());
  const double z = stats.avg_freq();
  for (WordId cn = 0; cn < stats.vocab_size(); ++cn) {
    const auto mass = stats.context_marginal(cn);
    if (mass == 0) continue;
    const double* cv = emb.ctx_vecs.data() + cn * dim;
    // k_I * Z * P_D(cn) equals k_I * #(cn) / |V| when Z = |D| / |V|.
    axpy(-k_inclusion * z * (static_cast<double>(mass) / total) * sigmoid(dot(wv, cv, dim)), cv,
         grad.data(), dim);
  }
  return grad;
}

std::vector<double> sampled_word_gradient(const Embedding& emb, const CoocStats& stats,
                                          double k_inclusion, WordId w, Rng& rng) {
  const std::uint64_t mass = stats.word_marginal(w);
  std::vector<double> out(emb.dim, 0.0);
  if (mass == 0) return out;
  std::uint64_t pick = rng.below(mass);
  WordId c = 0;
  for (const auto& e : stats.row(w)) {
    if (pick < e.count) {
      c = e.context;
      break;
    }
    pick -= e.count;
  }
  NegativePolicy policy;
  policy.k = k_inclusion;
  policy.avg_freq = stats.avg_freq();
  policy.word_marginals = stats.word_marginals();
  const NegativeSampler sampler(stats.context_marginals(), 1.0);
  GradBuffer gw(stats.vocab_size(), emb.dim);
  Scratch scratch(emb.dim);
  accumulate_occurrence<PlainAccess>(emb, w, c, policy, sampler, rng, gw, nullptr, scratch);
  const double* g = gw.row(w);
  for (std::size_t i = 0; i < emb.dim; ++i) out[i] = static_cast<double>(mass) * g[i];
  return out;
}

}  // namespace dive
