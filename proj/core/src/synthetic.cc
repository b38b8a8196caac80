#include "dive/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dive/error.hpp"
#include "dive/random.hpp"

namespace dive {

namespace {

// Fixed-width base-26 code so every generated word is purely alphabetic.
std::string code_word(std::string_view prefix, std::size_t i) {
  std::string out(prefix);
  char code[4];
  for (int k = 3; k >= 0; --k) {
    code[k] = static_cast<char>('a' + i % 26);
    i /= 26;
  }
  out.append(code, 4);
  return out;
}

std::size_t pick_weighted(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

void TaxonomyParams::validate() const {
  if (concepts == 0 || roots == 0 || roots > concepts) {
    throw ConfigError("taxonomy needs 1 <= roots <= concepts");
  }
  if (own_contexts == 0) throw ConfigError("own_contexts must be positive (empty context sets)");
  if (chunk_length == 0 || tokens == 0) throw ConfigError("tokens and chunk_length must be positive");
  if (max_children == 0 && concepts > roots) throw ConfigError("max_children must be positive");
  if (!(mention_rate > 0.0 && mention_rate < 1.0)) {
    throw ConfigError("mention_rate must lie in (0, 1)");
  }
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) {
    throw ConfigError("noise_fraction must lie in [0, 1)");
  }
  if (noise_fraction > 0.0 && noise_vocab == 0) throw ConfigError("noise_vocab must be positive");
  if (concepts + concepts * own_contexts + noise_vocab > 26u * 26u * 26u * 26u) {
    throw ConfigError("taxonomy too large for generated word codes");
  }
}

bool SyntheticTaxonomy::is_ancestor(std::size_t ancestor, std::size_t descendant) const {
  for (auto x = parent[descendant]; x >= 0; x = parent[static_cast<std::size_t>(x)]) {
    if (static_cast<std::size_t>(x) == ancestor) return true;
  }
  return false;
}

Dataset SyntheticTaxonomy::dataset(bool with_random, bool with_siblings, const std::string& name) const {
  Dataset ds;
  ds.name = name;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  auto add = [&](std::size_t q, std::size_t p, double label) {
    if (!seen.emplace(q, p).second) return;
    DatasetPair pair;
    pair.q_text = concept_words[q];
    pair.p_text = concept_words[p];
    pair.q = {pair.q_text};
    pair.p = {pair.p_text};
    pair.label = label;
    ds.pairs.push_back(std::move(pair));
  };
  for (auto [q, p] : planted) add(q, p, 1.0);
  if (with_random) {
    for (auto [q, p] : random_negatives) add(q, p, 0.0);
  }
  if (with_siblings) {
    for (auto [q, p] : sibling_negatives) add(q, p, 0.0);
  }
  return ds;
}

Dataset SyntheticTaxonomy::reversed_planted(const std::string& name) const {
  Dataset ds;
  ds.name = name;
  for (auto [q, p] : planted) {
    DatasetPair pair;
    pair.q_text = concept_words[p];
    pair.p_text = concept_words[q];
    pair.q = {pair.q_text};
    pair.p = {pair.p_text};
    pair.label = 1.0;
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

SyntheticTaxonomy make_synthetic_taxonomy(std::uint64_t seed, const TaxonomyParams& params) {
  params.validate();
  Rng rng(seed);
  SyntheticTaxonomy tax;
  const std::size_t n = params.concepts;

  // Random forest: the first `roots` concepts are roots; each later concept
  // attaches to a uniformly chosen concept that still has room.
  tax.parent.assign(n, -1);
  std::vector<std::size_t> depth(n, 0);
  std::vector<std::size_t> children(n, 0);
  for (std::size_t i = params.roots; i < n; ++i) {
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < i; ++j) {
      if (children[j] < params.max_children && depth[j] + 1 < params.max_depth) open.push_back(j);
    }
    if (open.empty()) throw ConfigError("taxonomy shape cannot hold the requested concepts");
    const auto par = open[rng.below(open.size())];
    tax.parent[i] = static_cast<std::int64_t>(par);
    depth[i] = depth[par] + 1;
    ++children[par];
  }

  tax.concept_words.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tax.concept_words.push_back(code_word("con", i));

  // Own contexts, then fold each subtree's sets into its ancestors. Children
  // always have larger indices than their parent.
  tax.contexts.assign(n, {});
  std::size_t next_ctx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < params.own_contexts; ++k) {
      tax.contexts[i].push_back(code_word("ctx", next_ctx++));
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    if (tax.parent[i] >= 0) {
      auto& up = tax.contexts[static_cast<std::size_t>(tax.parent[i])];
      up.insert(up.end(), tax.contexts[i].begin(), tax.contexts[i].end());
    }
  }
  for (auto& set : tax.contexts) std::sort(set.begin(), set.end());

  for (std::size_t i = 0; i < n; ++i) {
    for (auto x = tax.parent[i]; x >= 0; x = tax.parent[static_cast<std::size_t>(x)]) {
      tax.planted.emplace_back(i, static_cast<std::size_t>(x));
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && tax.parent[a] >= 0 && tax.parent[a] == tax.parent[b]) {
        tax.sibling_negatives.emplace_back(a, b);
      }
    }
  }
  const auto wanted = static_cast<std::size_t>(
      std::llround(params.negatives_per_positive * static_cast<double>(tax.planted.size())));
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (std::size_t attempts = 0; tax.random_negatives.size() < wanted && attempts < 100 * wanted + 100;
       ++attempts) {
    const auto q = rng.below(n);
    const auto p = rng.below(n);
    if (q == p || tax.is_ancestor(p, q) || !used.emplace(q, p).second) continue;
    tax.random_negatives.emplace_back(q, p);
  }

  // Chunk plan: every concept gets min_chunks chunks, the remaining concept
  // chunks follow |contexts|^exponent, the rest is noise; then shuffle.
  const std::size_t total_chunks = (params.tokens + params.chunk_length - 1) / params.chunk_length;
  const auto concept_chunks = std::max<std::size_t>(
      static_cast<std::size_t>(std::llround((1.0 - params.noise_fraction) *
                                            static_cast<double>(total_chunks))),
      std::min(total_chunks, n * params.min_chunks));
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::pow(static_cast<double>(tax.contexts[i].size()), params.generality_exponent);
    cumulative[i] = acc;
  }
  constexpr std::size_t kNoise = static_cast<std::size_t>(-1);
  std::vector<std::size_t> plan;
  plan.reserve(total_chunks);
  for (std::size_t i = 0; i < n && plan.size() < concept_chunks; ++i) {
    for (std::size_t k = 0; k < params.min_chunks && plan.size() < concept_chunks; ++k) plan.push_back(i);
  }
  while (plan.size() < concept_chunks) plan.push_back(pick_weighted(cumulative, rng));
  plan.resize(total_chunks, kNoise);
  for (std::size_t i = plan.size(); i > 1; --i) std::swap(plan[i - 1], plan[rng.below(i)]);

  std::vector<std::string> noise;
  for (std::size_t i = 0; i < params.noise_vocab; ++i) noise.push_back(code_word("nz", i));

  std::string& out = tax.corpus;
  out.reserve(params.tokens * 9);
  for (const std::size_t x : plan) {
    const std::size_t len = std::min(params.chunk_length, params.tokens - tax.token_count);
    for (std::size_t t = 0; t < len; ++t) {
      if (t) out += ' ';
      if (x == kNoise) {
        out += noise[rng.below(noise.size())];
      } else if (rng.bernoulli(params.mention_rate)) {
        out += tax.concept_words[x];
      } else {
        out += tax.contexts[x][rng.below(tax.contexts[x].size())];
      }
    }
    out += '\n';
    tax.token_count += len;
  }
  return tax;
}

}  // namespace dive
