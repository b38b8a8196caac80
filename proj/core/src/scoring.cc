#include "dive/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dive/error.hpp"
#include "dive/random.hpp"

namespace dive {

WordVector::WordVector(std::vector<Feature> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Feature& a, const Feature& b) { return a.index < b.index; });
  double sq = 0.0;
  for (const auto& f : entries_) {
    norm1_ += std::abs(f.value);
    sum_ += f.value;
    sq += f.value * f.value;
  }
  norm2_ = std::sqrt(sq);
}

WordVector WordVector::from_dense(std::span<const double> values) {
  std::vector<Feature> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({static_cast<std::uint32_t>(i), values[i]});
  }
  return WordVector(std::move(entries));
}

double WordVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Feature& f, std::uint32_t i) { return f.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

ContextDistribution normalize(const WordVector& v) {
  ContextDistribution d = v.entries();
  if (v.sum() == 0.0) return {};
  for (auto& f : d) f.value /= v.sum();
  return d;
}

std::optional<double> entropy(const WordVector& v) {
  if (v.is_zero()) return std::nullopt;
  double h = 0.0;
  for (const auto& f : normalize(v)) {
    if (f.value > 0.0) h -= f.value * std::log(f.value);
  }
  return h;
}

VectorSpace VectorSpace::from_features(const FeatureSpace& space) {
  VectorSpace out;
  out.dims_ = space.dims();
  out.words_ = space.row_labels;
  out.rows_.reserve(space.rows.size());
  for (const auto& r : space.rows) out.rows_.emplace_back(r);
  for (std::size_t i = 0; i < out.words_.size(); ++i) out.index_.emplace(out.words_[i], i);
  if (space.kind != SpaceKind::kFreqNmf) {
    out.context_row_.assign(space.dims(), -1);
    for (std::size_t c = 0; c < space.dims(); ++c) {
      auto it = out.index_.find(space.context_labels[c]);
      if (it != out.index_.end()) out.context_row_[c] = static_cast<std::int64_t>(it->second);
    }
  }
  out.entropy_.reserve(out.rows_.size());
  for (const auto& r : out.rows_) {
    out.entropy_.push_back(entropy(r).value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return out;
}

VectorSpace VectorSpace::from_embedding(const Embedding& emb) {
  VectorSpace out;
  out.dims_ = emb.dim;
  out.words_ = emb.words;
  out.rows_.reserve(emb.words.size());
  for (std::size_t i = 0; i < emb.words.size(); ++i) {
    out.rows_.push_back(WordVector::from_dense(emb.word(i)));
    out.index_.emplace(out.words_[i], i);
  }
  out.entropy_.reserve(out.rows_.size());
  for (const auto& r : out.rows_) {
    out.entropy_.push_back(entropy(r).value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return out;
}

const WordVector* VectorSpace::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &rows_[it->second];
}

std::optional<std::size_t> VectorSpace::context_row(std::uint32_t column) const {
  if (column >= context_row_.size() || context_row_[column] < 0) return std::nullopt;
  return static_cast<std::size_t>(context_row_[column]);
}

std::optional<double> VectorSpace::row_entropy(std::size_t i) const {
  if (std::isnan(entropy_[i])) return std::nullopt;
  return entropy_[i];
}

namespace {

// Visits the union of supports of two sorted sparse vectors.
template <typename Fn>
void merge_visit(const std::vector<Feature>& a, const std::vector<Feature>& b, Fn fn) {
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      fn(a[i].index, a[i].value, 0.0);
      ++i;
    } else if (i == a.size() || b[j].index < a[i].index) {
      fn(b[j].index, 0.0, b[j].value);
      ++j;
    } else {
      fn(a[i].index, a[i].value, b[j].value);
      ++i;
      ++j;
    }
  }
}

}  // namespace

std::optional<double> cosine(const WordVector& u, const WordVector& v) {
  if (u.is_zero() || v.is_zero()) return std::nullopt;
  double d = 0.0;
  merge_visit(u.entries(), v.entries(), [&](std::uint32_t, double a, double b) { d += a * b; });
  return d / (u.norm2() * v.norm2());
}

double sum_diff(const WordVector& q, const WordVector& p) { return p.norm1() - q.norm1(); }

double norm2_diff(const WordVector& q, const WordVector& p) { return p.norm2() - q.norm2(); }

std::optional<double> entropy_diff(const WordVector& q, const WordVector& p) {
  auto hq = entropy(q);
  auto hp = entropy(p);
  if (!hq || !hp) return std::nullopt;
  return *hp - *hq;
}

std::optional<double> median_top_context_entropy(const WordVector& w, const VectorSpace& space,
                                                 std::size_t top_n) {
  if (w.is_zero() || top_n == 0) return std::nullopt;
  std::vector<Feature> ranked = w.entries();
  const std::size_t n = std::min(top_n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(),
                    [](const Feature& a, const Feature& b) {
                      return a.value != b.value ? a.value > b.value : a.index < b.index;
                    });
  std::vector<double> entropies;
  entropies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = space.context_row(ranked[i].index);
    if (!row) continue;
    if (auto h = space.row_entropy(*row)) entropies.push_back(*h);
  }
  if (entropies.empty()) return std::nullopt;
  std::sort(entropies.begin(), entropies.end());
  const std::size_t m = entropies.size();
  return m % 2 ? entropies[m / 2] : 0.5 * (entropies[m / 2 - 1] + entropies[m / 2]);
}

std::optional<double> slqs_sub(const WordVector& q, const WordVector& p, const VectorSpace& space,
                               std::size_t top_n) {
  auto eq = median_top_context_entropy(q, space, top_n);
  auto ep = median_top_context_entropy(p, space, top_n);
  if (!eq || !ep) return std::nullopt;
  return *ep - *eq;
}

std::optional<double> cde(const WordVector& q, const WordVector& p) {
  if (!(q.norm1() > 0.0)) return std::nullopt;
  double inter = 0.0;
  merge_visit(q.entries(), p.entries(),
              [&](std::uint32_t, double a, double b) { inter += std::min(a, b); });
  return inter / q.norm1();
}

std::optional<double> weeds_precision(const WordVector& q, const WordVector& p) {
  if (!(q.norm1() > 0.0)) return std::nullopt;
  double shared = 0.0;
  merge_visit(q.entries(), p.entries(), [&](std::uint32_t, double a, double b) {
    if (b > 0.0) shared += a;
  });
  return shared / q.norm1();
}

std::optional<double> invcl(const WordVector& q, const WordVector& p) {
  auto forward = cde(q, p);
  auto backward = cde(p, q);
  if (!forward || !backward) return std::nullopt;
  return std::sqrt(std::max(0.0, *forward * (1.0 - *backward)));
}

std::optional<double> al1(const WordVector& q, const WordVector& p, double w0) {
  if (!(w0 > 0.0)) throw ConfigError("AL1 weight w0 must be positive");
  if (!(q.sum() > 0.0) || !(p.sum() > 0.0)) return std::nullopt;
  struct Candidate {
    double ratio;
    double dq;
    std::uint32_t index;
  };
  // Contexts with dq = 0 have infinite ratio and are never funded.
  std::vector<Candidate> candidates;
  candidates.reserve(q.entries().size());
  const double q_sum = q.sum();
  const double p_sum = p.sum();
  merge_visit(q.entries(), p.entries(), [&](std::uint32_t c, double a, double b) {
    if (a > 0.0) {
      const double dq = a / q_sum;
      candidates.push_back({(b / p_sum) / dq, dq, c});
    }
  });
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return x.ratio != y.ratio ? x.ratio < y.ratio : x.index < y.index;
  });
  double spent = 0.0;
  double cost = 0.0;
  for (const auto& cand : candidates) {
    const double mu = std::min(1.0 - spent, (w0 + 1.0) * cand.dq);
    cost += mu * cand.ratio;
    spent += mu;
    if (spent >= 1.0) break;
  }
  return std::max(0.0, 1.0 - cost);
}

double random_score(std::string_view q, std::string_view p, std::uint64_t seed) {
  // FNV-1a over "q\tp", mixed with the seed.
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001B3ull;
    }
  };
  feed(q);
  feed("\t");
  feed(p);
  const std::uint64_t x = splitmix64(h ^ splitmix64(seed));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

namespace {

struct ScorerName {
  ScorerKind kind;
  std::string_view name;
};

constexpr std::array<ScorerName, 17> kScorerNames{{
    {ScorerKind::kCosine, "cosine"},     {ScorerKind::kWord2Vec, "word2vec"},
    {ScorerKind::kSumDiff, "dS"},        {ScorerKind::kNorm2Diff, "dQ"},
    {ScorerKind::kEntropyDiff, "dE"},    {ScorerKind::kSlqsSub, "slqs_sub"},
    {ScorerKind::kCde, "cde"},           {ScorerKind::kWeeds, "weeds"},
    {ScorerKind::kInvCl, "invcl"},       {ScorerKind::kAl1, "al1"},
    {ScorerKind::kCdS, "CdS"},           {ScorerKind::kCdQ, "CdQ"},
    {ScorerKind::kCdE, "CdE"},           {ScorerKind::kWdS, "WdS"},
    {ScorerKind::kWdQ, "WdQ"},           {ScorerKind::kWdE, "WdE"},
    {ScorerKind::kRandom, "random"},
}};

constexpr std::array<ScorerKind, 17> kAllScorers = [] {
  std::array<ScorerKind, 17> out{};
  for (std::size_t i = 0; i < kScorerNames.size(); ++i) out[i] = kScorerNames[i].kind;
  return out;
}();

bool usable(const WordVector* v) { return v != nullptr && !v->is_zero(); }

}  // namespace

std::optional<ScorerKind> parse_scorer(std::string_view name) {
  for (const auto& s : kScorerNames) {
    if (s.name == name) return s.kind;
  }
  return std::nullopt;
}

std::string_view scorer_name(ScorerKind kind) {
  for (const auto& s : kScorerNames) {
    if (s.kind == kind) return s.name;
  }
  return "unknown";
}

std::span<const ScorerKind> all_scorers() { return kAllScorers; }

bool needs_sgns(ScorerKind kind) {
  return kind == ScorerKind::kWord2Vec || kind == ScorerKind::kWdS || kind == ScorerKind::kWdQ ||
         kind == ScorerKind::kWdE;
}

bool is_generality(ScorerKind kind) {
  return kind == ScorerKind::kSumDiff || kind == ScorerKind::kNorm2Diff ||
         kind == ScorerKind::kEntropyDiff || kind == ScorerKind::kSlqsSub;
}

Scorer::Scorer(ScorerKind kind, const VectorSpace* space, const VectorSpace* sgns,
               ScorerParams params)
    : kind_(kind), space_(space), sgns_(sgns), params_(params) {
  if (kind_ == ScorerKind::kRandom) return;
  if (needs_sgns(kind_) && sgns_ == nullptr) {
    throw ConfigError("scorer '" + std::string(scorer_name(kind_)) +
                      "' needs skip-gram vectors");
  }
  if (kind_ != ScorerKind::kWord2Vec && space_ == nullptr) {
    throw ConfigError("scorer '" + std::string(scorer_name(kind_)) + "' needs a vector space");
  }
  if (kind_ == ScorerKind::kSlqsSub && !space_->columns_are_words()) {
    throw ConfigError("slqs_sub needs a space whose features are context words");
  }
  if (!(params_.al1_w0 > 0.0)) throw ConfigError("AL1 weight w0 must be positive");
}

std::optional<double> Scorer::score(const PairVectors& pair) const {
  if (kind_ == ScorerKind::kRandom) return random_score(pair.q_text, pair.p_text, params_.random_seed);
  const bool main_ok = usable(pair.q) && usable(pair.p);
  const bool sgns_ok = usable(pair.q_sgns) && usable(pair.p_sgns);
  if (kind_ != ScorerKind::kWord2Vec && !main_ok) return std::nullopt;
  if (needs_sgns(kind_) && !sgns_ok) return std::nullopt;

  auto times = [](std::optional<double> sim, std::optional<double> gen) -> std::optional<double> {
    if (!sim || !gen) return std::nullopt;
    return *sim * *gen;
  };
  switch (kind_) {
    case ScorerKind::kCosine: return cosine(*pair.q, *pair.p);
    case ScorerKind::kWord2Vec: return cosine(*pair.q_sgns, *pair.p_sgns);
    case ScorerKind::kSumDiff: return sum_diff(*pair.q, *pair.p);
    case ScorerKind::kNorm2Diff: return norm2_diff(*pair.q, *pair.p);
    case ScorerKind::kEntropyDiff: return entropy_diff(*pair.q, *pair.p);
    case ScorerKind::kSlqsSub: return slqs_sub(*pair.q, *pair.p, *space_, params_.slqs_top_n);
    case ScorerKind::kCde: return cde(*pair.q, *pair.p);
    case ScorerKind::kWeeds: return weeds_precision(*pair.q, *pair.p);
    case ScorerKind::kInvCl: return invcl(*pair.q, *pair.p);
    case ScorerKind::kAl1: {
      auto d = al1(*pair.q, *pair.p, params_.al1_w0);
      if (!d) return std::nullopt;
      return -*d;
    }
    case ScorerKind::kCdS: return times(cosine(*pair.q, *pair.p), sum_diff(*pair.q, *pair.p));
    case ScorerKind::kCdQ: return times(cosine(*pair.q, *pair.p), norm2_diff(*pair.q, *pair.p));
    case ScorerKind::kCdE: return times(cosine(*pair.q, *pair.p), entropy_diff(*pair.q, *pair.p));
    case ScorerKind::kWdS:
      return times(cosine(*pair.q_sgns, *pair.p_sgns), sum_diff(*pair.q, *pair.p));
    case ScorerKind::kWdQ:
      return times(cosine(*pair.q_sgns, *pair.p_sgns), norm2_diff(*pair.q, *pair.p));
    case ScorerKind::kWdE:
      return times(cosine(*pair.q_sgns, *pair.p_sgns), entropy_diff(*pair.q, *pair.p));
    case ScorerKind::kRandom: break;
  }
  return std::nullopt;
}

}  // namespace dive
