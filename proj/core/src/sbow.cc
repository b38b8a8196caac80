#include "dive/sbow.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "dive/error.hpp"
#include "text_util.hpp"

namespace dive {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kFreq: return "freq";
    case SpaceKind::kPpmi: return "ppmi";
    case SpaceKind::kPpmiIs: return "ppmi_is";
    case SpaceKind::kFreqNmf: return "freq_nmf";
  }
  return "unknown";
}

std::optional<SpaceKind> parse_space_kind(std::string_view name) {
  if (name == "freq") return SpaceKind::kFreq;
  if (name == "ppmi") return SpaceKind::kPpmi;
  if (name == "ppmi_is") return SpaceKind::kPpmiIs;
  if (name == "freq_nmf") return SpaceKind::kFreqNmf;
  return std::nullopt;
}

void FeatureSpace::validate() const {
  if (rows.size() != row_labels.size()) throw InternalError("feature space rows/labels mismatch");
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].index >= dims()) throw InternalError("feature index out of range");
      if (!(r[i].value > 0.0) || !std::isfinite(r[i].value)) {
        throw InternalError("feature values must be positive and finite");
      }
      if (i > 0 && r[i - 1].index >= r[i].index) throw InternalError("feature row not sorted");
    }
  }
}

CoocStats pmi_filter(const CoocStats& stats, double k_f) {
  if (!(k_f >= 1.0)) throw ConfigError("PMI filter threshold k_f must be >= 1");
  std::vector<std::vector<CoocEntry>> kept(stats.vocab_size());
  const long double total = static_cast<long double>(stats.total());
  for (WordId w = 0; w < stats.vocab_size(); ++w) {
    const long double word = static_cast<long double>(stats.word_marginal(w));
    for (const auto& e : stats.row(w)) {
      // PMI >= log(k_f)  <=>  #(w,c)|D| >= k_f #(w) #(c), compared without logs.
      const long double lhs = static_cast<long double>(e.count) * total;
      const long double rhs =
          static_cast<long double>(k_f) * word * static_cast<long double>(stats.context_marginal(e.context));
      if (lhs >= rhs) kept[w].push_back(e);
    }
  }
  return CoocStats(stats.words(), stats.window(), std::move(kept), stats.avg_freq(), k_f);
}

double inclusion_shifted_pmi(const CoocStats& stats, WordId w, WordId c, double k_inclusion) {
  const auto pair = stats.count(w, c);
  if (pair == 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(pair) * static_cast<double>(stats.total()) /
                  (k_inclusion * stats.avg_freq() * static_cast<double>(stats.context_marginal(c))));
}

namespace {

template <typename ValueFn>
FeatureSpace build_from_stats(const CoocStats& stats, SpaceKind kind, ValueFn value) {
  FeatureSpace space;
  space.kind = kind;
  space.row_labels = stats.words();
  space.context_labels = stats.words();
  space.rows.resize(stats.vocab_size());
  for (WordId w = 0; w < stats.vocab_size(); ++w) {
    auto& row = space.rows[w];
    for (const auto& e : stats.row(w)) {
      const double v = value(w, e);
      if (v > 0.0) row.push_back({e.context, v});
    }
  }
  return space;
}

}  // namespace

FeatureSpace build_freq(const CoocStats& stats) {
  return build_from_stats(stats, SpaceKind::kFreq, [](WordId, const CoocEntry& e) {
    return static_cast<double>(e.count);
  });
}

FeatureSpace build_ppmi(const CoocStats& stats) {
  return build_from_stats(stats, SpaceKind::kPpmi, [&](WordId w, const CoocEntry& e) {
    return std::max(0.0, pmi_from_counts(e.count, stats.word_marginal(w),
                                         stats.context_marginal(e.context), stats.total()));
  });
}

FeatureSpace build_ppmi_is(const CoocStats& stats) {
  const double v = static_cast<double>(stats.vocab_size());
  return build_from_stats(stats, SpaceKind::kPpmiIs, [&](WordId, const CoocEntry& e) {
    return std::max(0.0, std::log(static_cast<double>(e.count) * v /
                                  static_cast<double>(stats.context_marginal(e.context))));
  });
}

FeatureSpace hash_by_cluster(const CoocStats& stats, std::span<const std::uint32_t> assignment,
                             std::size_t clusters) {
  if (assignment.size() != stats.vocab_size()) {
    throw ConfigError("cluster assignment must cover every context word");
  }
  FeatureSpace space;
  space.kind = SpaceKind::kFreqNmf;
  space.row_labels = stats.words();
  space.context_labels.reserve(clusters);
  for (std::size_t k = 0; k < clusters; ++k) space.context_labels.push_back(std::to_string(k));
  space.rows.resize(stats.vocab_size());
  std::vector<double> acc(clusters, 0.0);
  std::vector<std::uint32_t> touched;
  for (WordId w = 0; w < stats.vocab_size(); ++w) {
    for (const auto& e : stats.row(w)) {
      const auto k = assignment[e.context];
      if (k >= clusters) throw ConfigError("cluster id out of range");
      if (acc[k] == 0.0) touched.push_back(k);
      acc[k] += static_cast<double>(e.count);
    }
    std::sort(touched.begin(), touched.end());
    auto& row = space.rows[w];
    row.reserve(touched.size());
    for (auto k : touched) {
      row.push_back({k, acc[k]});
      acc[k] = 0.0;
    }
    touched.clear();
  }
  return space;
}

FeatureSpace kmeans_freq_nmf(const Embedding& skipgram, const CoocStats& stats,
                             const KMeansOptions& options) {
  if (options.clusters == 0) throw ConfigError("number of clusters must be positive");
  const auto index = word_index(skipgram);
  const std::size_t dim = skipgram.dim;
  std::vector<double> points(stats.vocab_size() * dim);
  for (WordId c = 0; c < stats.vocab_size(); ++c) {
    auto it = index.find(stats.words()[c]);
    if (it == index.end()) {
      throw ConfigError("skip-gram embedding lacks context word '" + stats.words()[c] + "'");
    }
    auto v = skipgram.word(it->second);
    std::copy(v.begin(), v.end(), points.begin() + static_cast<std::ptrdiff_t>(c * dim));
  }
  const auto km = mini_batch_kmeans(points, dim, options);
  return hash_by_cluster(stats, km.assignment, options.clusters);
}

void save_space(std::ostream& out, const FeatureSpace& space) {
  out << "#dive-space\t1\n";
  out << "#kind\t" << to_string(space.kind) << '\n';
  out << "#rows\t" << space.rows.size() << '\n';
  out << "#dims\t" << space.dims() << '\n';
  for (const auto& w : space.row_labels) out << "#row\t" << w << '\n';
  for (const auto& c : space.context_labels) out << "#context\t" << c << '\n';
  std::string line;
  for (std::size_t w = 0; w < space.rows.size(); ++w) {
    for (const auto& f : space.rows[w]) {
      line.clear();
      line += space.row_labels[w];
      line += '\t';
      line += space.context_labels[f.index];
      line += '\t';
      detail::append_double(line, f.value);
      line += '\n';
      out << line;
    }
  }
}

FeatureSpace load_space(std::istream& in, const std::string& source) {
  FeatureSpace space;
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_rows = 0;
  std::size_t n_dims = 0;
  bool have_magic = false;
  bool have_kind = false;
  bool header_done = false;
  std::unordered_map<std::string, std::uint32_t> row_index;
  std::unordered_map<std::string, std::uint32_t> ctx_index;
  auto fail = [&](const std::string& msg) { return ParseError(source, line_no, msg); };

  auto close_header = [&] {
    if (!have_magic || !have_kind) throw fail("missing #dive-space header");
    if (space.row_labels.size() != n_rows || space.context_labels.size() != n_dims) {
      throw fail("label count does not match #rows/#dims");
    }
    space.rows.resize(n_rows);
    header_done = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim_cr(line);
    if (body.empty()) continue;
    const auto fields = detail::split(body, '\t');
    if (body.front() == '#') {
      if (header_done) throw fail("header line after data");
      if (fields.size() != 2) throw fail("malformed header line");
      const auto key = fields[0];
      const std::string value(fields[1]);
      if (key == "#dive-space") {
        have_magic = true;
      } else if (key == "#kind") {
        auto kind = parse_space_kind(value);
        if (!kind) throw fail("unknown space kind '" + value + "'");
        space.kind = *kind;
        have_kind = true;
      } else if (key == "#rows") {
        auto v = detail::parse_int<std::size_t>(value);
        if (!v) throw fail("bad #rows");
        n_rows = *v;
      } else if (key == "#dims") {
        auto v = detail::parse_int<std::size_t>(value);
        if (!v) throw fail("bad #dims");
        n_dims = *v;
      } else if (key == "#row") {
        if (!row_index.emplace(value, space.row_labels.size()).second) throw fail("duplicate row");
        space.row_labels.push_back(value);
      } else if (key == "#context") {
        if (!ctx_index.emplace(value, space.context_labels.size()).second) {
          throw fail("duplicate context");
        }
        space.context_labels.push_back(value);
      } else {
        throw fail("unknown header line");
      }
      continue;
    }
    if (!header_done) close_header();
    if (fields.size() != 3) throw fail("expected word<TAB>context<TAB>value");
    auto r = row_index.find(std::string(fields[0]));
    auto c = ctx_index.find(std::string(fields[1]));
    if (r == row_index.end() || c == ctx_index.end()) throw fail("label missing from header");
    auto v = detail::parse_double(fields[2]);
    if (!v || !(*v > 0.0)) throw fail("feature value must be a positive number");
    space.rows[r->second].push_back({c->second, *v});
  }
  if (!header_done) close_header();
  for (auto& row : space.rows) {
    std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].index == row[i - 1].index) throw fail("duplicate feature");
    }
  }
  return space;
}

}  // namespace dive
