#include "dive/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "dive/error.hpp"
#include "dive/random.hpp"
#include "text_util.hpp"

namespace dive {

namespace {

std::optional<bool> parse_bool_label(std::string_view s) {
  std::string lower(s);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "true" || lower == "1") return true;
  if (lower == "false" || lower == "0") return false;
  return std::nullopt;
}

// Lowercases the surface word, leaving any "_TAG" suffix untouched.
std::string normalize_member(std::string_view word) {
  std::string out(word);
  const auto sep = out.find(kPosSeparator);
  const auto end = sep == std::string::npos ? out.size() : sep;
  for (std::size_t i = 0; i < end; ++i) {
    out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  }
  return out;
}

std::vector<std::string> split_phrase(std::string_view side) {
  std::vector<std::string> out;
  for (auto w : split_whitespace(side)) out.push_back(normalize_member(w));
  return out;
}

}  // namespace

DatasetPair make_dataset_pair(std::string_view q, std::string_view p, double label) {
  DatasetPair pair;
  pair.q_text = std::string(q);
  pair.p_text = std::string(p);
  pair.q = split_phrase(q);
  pair.p = split_phrase(p);
  pair.label = label;
  return pair;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const DatasetPair& p) { return p.label > 0.5; }));
}

Dataset load_dataset(std::istream& in, const std::string& name, LabelMode mode) {
  struct Raw {
    std::size_t line;
    std::string q, p, label;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim_cr(line);
    if (split_whitespace(body, line_no).empty()) continue;
    const auto fields = detail::split(body, '\t');
    if (fields.size() < 3) {
      throw ParseError(name, line_no, "expected word1<TAB>word2<TAB>label");
    }
    raw.push_back({line_no, std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
  }
  if (!raw.empty()) {
    const auto& first = raw.front().label;
    if (!parse_bool_label(first) && !detail::parse_double(first)) raw.erase(raw.begin());
  }
  if (raw.empty()) throw ParseError(name, line_no, "dataset has no pairs");

  bool graded = mode == LabelMode::kGraded;
  if (mode == LabelMode::kAuto) {
    graded = !std::all_of(raw.begin(), raw.end(),
                          [](const Raw& r) { return parse_bool_label(r.label).has_value(); });
  }

  Dataset ds;
  ds.name = name;
  ds.graded = graded;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : raw) {
    auto pair = make_dataset_pair(r.q, r.p);
    if (pair.q.empty() || pair.p.empty()) throw ParseError(name, r.line, "empty word column");
    if (graded) {
      auto v = detail::parse_double(r.label);
      if (!v || !std::isfinite(*v)) throw ParseError(name, r.line, "bad graded label '" + r.label + "'");
      pair.label = *v;
    } else {
      auto b = parse_bool_label(r.label);
      if (!b) throw ParseError(name, r.line, "bad detection label '" + r.label + "'");
      pair.label = *b ? 1.0 : 0.0;
    }
    if (!seen.emplace(r.q, r.p).second) {
      ++ds.duplicates_dropped;
      continue;
    }
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

Dataset load_dataset_file(const std::string& path, LabelMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);
  auto name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return load_dataset(in, name, mode);
}

std::optional<WordVector> compose_phrase(std::span<const std::string> words,
                                         const VectorSpace& space) {
  std::vector<const WordVector*> members;
  for (const auto& w : words) {
    if (const auto* v = space.find(w)) members.push_back(v);
  }
  if (members.empty()) return std::nullopt;
  if (members.size() == 1) return *members.front();
  std::vector<double> acc(space.dims(), 0.0);
  for (const auto* v : members) {
    for (const auto& f : v->entries()) acc[f.index] += f.value;
  }
  const double n = static_cast<double>(members.size());
  for (auto& x : acc) x /= n;
  return WordVector::from_dense(acc);
}

Ranking rank_scores(std::span<const std::optional<double>> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InternalError("scores/labels size mismatch");
  Ranking scored;
  Ranking oov;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] && !std::isnan(*scores[i])) {
      scored.push_back({i, *scores[i], false, labels[i]});
    } else {
      oov.push_back({i, -std::numeric_limits<double>::infinity(), true, labels[i]});
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const RankedPair& a, const RankedPair& b) { return a.score > b.score; });
  scored.insert(scored.end(), oov.begin(), oov.end());
  return scored;
}

Ranking rank_pairs(const Dataset& dataset, const Scorer& scorer) {
  std::vector<std::optional<double>> scores;
  std::vector<double> labels;
  scores.reserve(dataset.pairs.size());
  labels.reserve(dataset.pairs.size());
  for (const auto& pair : dataset.pairs) {
    std::optional<WordVector> q, p, qs, ps;
    if (scorer.space()) {
      q = compose_phrase(pair.q, *scorer.space());
      p = compose_phrase(pair.p, *scorer.space());
    }
    if (scorer.sgns_space()) {
      qs = compose_phrase(pair.q, *scorer.sgns_space());
      ps = compose_phrase(pair.p, *scorer.sgns_space());
    }
    PairVectors pv;
    pv.q = q ? &*q : nullptr;
    pv.p = p ? &*p : nullptr;
    pv.q_sgns = qs ? &*qs : nullptr;
    pv.p_sgns = ps ? &*ps : nullptr;
    pv.q_text = pair.q_text;
    pv.p_text = pair.p_text;
    scores.push_back(scorer.score(pv));
    labels.push_back(pair.label);
  }
  return rank_scores(scores, labels);
}

double average_precision(std::span<const int> ranked_labels) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked_labels.size(); ++k) {
    if (ranked_labels[k]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits == 0) throw NumericError("average precision is undefined without positive pairs");
  return sum / static_cast<double>(hits);
}

double average_precision(const Ranking& ranking) {
  std::vector<int> labels;
  labels.reserve(ranking.size());
  for (const auto& r : ranking) labels.push_back(r.label > 0.5 ? 1 : 0);
  return average_precision(labels);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank mean((i+1)..j)
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) throw InternalError("spearman inputs differ in length");
  const std::size_t n = pred.size();
  if (n < 2) throw NumericError("spearman needs at least two pairs");
  const auto rx = average_ranks(pred);
  const auto ry = average_ranks(gold);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("spearman is undefined for a constant ranking");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(const Ranking& ranking) {
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& r : ranking) {
    if (!r.oov) floor = std::min(floor, r.score);
  }
  const double sentinel = std::isfinite(floor) ? floor - 1.0 : 0.0;
  std::vector<double> pred, gold;
  pred.reserve(ranking.size());
  gold.reserve(ranking.size());
  for (const auto& r : ranking) {
    pred.push_back(r.oov ? sentinel : r.score);
    gold.push_back(r.label);
  }
  return spearman(pred, gold);
}

double directionality_accuracy(const Dataset& dataset, const Scorer& generality,
                               std::uint64_t seed) {
  Dataset positives;
  positives.name = dataset.name;
  for (const auto& p : dataset.pairs) {
    if (p.label > 0.5) positives.pairs.push_back(p);
  }
  if (positives.pairs.empty()) throw NumericError("directionality needs hypernym pairs");
  const auto ranking = rank_pairs(positives, generality);
  std::vector<const RankedPair*> by_input(ranking.size());
  for (const auto& r : ranking) by_input[r.index] = &r;
  Rng coin(seed);
  std::size_t correct = 0;
  for (const auto* r : by_input) {
    if (r->oov) {
      if (coin.bernoulli(0.5)) ++correct;
    } else if (r->score > 0.0) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(by_input.size());
}

double micro_average(std::span<const DatasetResult> results) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : results) {
    num += r.value * static_cast<double>(r.n);
    den += static_cast<double>(r.n);
  }
  if (den == 0.0) throw NumericError("micro average over zero pairs");
  return num / den;
}

std::optional<double> EvalReport::micro_average_ap() const {
  std::vector<DatasetResult> ap;
  for (const auto& r : results) {
    if (r.metric == "AP@all") ap.push_back(r);
  }
  if (ap.empty()) return std::nullopt;
  return micro_average(ap);
}

DatasetResult evaluate_dataset(const Dataset& dataset, const Scorer& scorer) {
  const auto ranking = rank_pairs(dataset, scorer);
  DatasetResult r;
  r.dataset = dataset.name;
  r.n = dataset.pairs.size();
  r.oov = static_cast<std::size_t>(
      std::count_if(ranking.begin(), ranking.end(), [](const RankedPair& x) { return x.oov; }));
  if (dataset.graded) {
    r.metric = "spearman";
    r.value = spearman(ranking);
  } else {
    r.metric = "AP@all";
    r.value = average_precision(ranking);
  }
  return r;
}

void write_report_kv(std::ostream& out, const EvalReport& report) {
  const auto old = out.precision(6);
  for (const auto& r : report.results) {
    out << "space=" << report.space << " scorer=" << report.scorer << " dataset=" << r.dataset
        << " metric=" << r.metric << " value=" << std::fixed << r.value << std::defaultfloat
        << " N=" << r.n << " OOV=" << r.oov << '\n';
  }
  if (auto micro = report.micro_average_ap()) {
    std::size_t n = 0;
    for (const auto& r : report.results) {
      if (r.metric == "AP@all") n += r.n;
    }
    out << "space=" << report.space << " scorer=" << report.scorer
        << " dataset=micro_average metric=AP@all value=" << std::fixed << *micro
        << std::defaultfloat << " N=" << n << '\n';
  }
  out.precision(old);
}

void write_report_table(std::ostream& out, std::span<const EvalReport> reports) {
  std::vector<std::string> datasets;
  for (const auto& rep : reports) {
    for (const auto& r : rep.results) {
      if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
        datasets.push_back(r.dataset);
      }
    }
  }
  out << "space\tscorer";
  for (const auto& d : datasets) out << '\t' << d;
  out << "\tmicro_average\n";
  for (const auto& rep : reports) {
    out << rep.space << '\t' << rep.scorer;
    for (const auto& d : datasets) {
      auto it = std::find_if(rep.results.begin(), rep.results.end(),
                             [&](const DatasetResult& r) { return r.dataset == d; });
      out << '\t';
      if (it != rep.results.end()) out << std::fixed << std::setprecision(1) << 100.0 * it->value;
    }
    out << '\t';
    if (auto micro = rep.micro_average_ap()) out << std::fixed << std::setprecision(1) << 100.0 * *micro;
    out << std::defaultfloat << '\n';
  }
}

}  // namespace dive
