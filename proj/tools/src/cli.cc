#include "dive/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "dive/cooccur.hpp"
#include "dive/corpus.hpp"
#include "dive/eval.hpp"
#include "dive/sbow.hpp"
#include "dive/scoring.hpp"
#include "dive/synthetic.hpp"
#include "dive/trainer.hpp"

namespace dive::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing required option --" + flag);
}

// Text files starting with '#' are sparse feature spaces; anything else is
// read as an embedding.
VectorSpace load_vector_space(const std::string& path) {
  auto in = open_in(path);
  if (in.peek() == '#') return VectorSpace::from_features(load_space(in, path));
  return VectorSpace::from_embedding(load_embedding(in, path));
}

Embedding load_embedding_file(const std::string& path) {
  auto in = open_in(path);
  return load_embedding(in, path);
}

CoocStats load_cooc_file(const std::string& path) {
  auto in = open_in(path);
  return load_cooc(in, path);
}

std::string fixed(double v, int precision = 6) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

struct Options {
  std::string config;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  // paths
  std::string input, output, vocab, stats, sgns, space, pairs, embedding, stopwords, retained,
      contexts_output, dataset_output, reversed_output;
  std::vector<std::string> datasets;

  // preprocess / vocab / cooc / filter / sbow
  std::size_t chunk_length = 100;
  std::size_t max_tokens = 0;
  bool no_stopwords = false;
  std::string pos = "off";
  std::uint64_t min_count = 10;
  std::uint32_t window = 20;
  double k_filter = 30.0;
  std::string kind = "freq";

  // training
  TrainHyper hyper;

  // k-means
  KMeansOptions kmeans;

  // scoring / eval
  std::vector<std::string> scorers{"CdS"};
  double w0 = 5.0;
  std::size_t top_n = 100;
  std::string format = "kv";
  std::string label_mode = "auto";
  bool direction = false;

  // topics
  std::string word, query;
  std::size_t top_k = 10;
  CLI::Option* top_k_opt = nullptr;
  double min_value = 0.1;
  bool general = false;

  // synth
  TaxonomyParams taxonomy;
};

std::uint64_t resolve_seed(Options& o, std::ostream& out) {
  if (o.seed_opt->count() == 0) {
    std::random_device rd;
    o.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  out << "seed=" << o.seed << '\n';
  return o.seed;
}

std::vector<CLI::App*> all_apps(CLI::App& app) {
  std::vector<CLI::App*> apps{&app};
  for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) apps.push_back(sub);
  return apps;
}

// Fills options not given on the command line from the config file.
void apply_config(CLI::App& app, CLI::App* active, const std::map<std::string, std::string>& cfg) {
  std::set<std::string> known;
  for (auto* a : all_apps(app)) {
    for (const auto* opt : a->get_options()) {
      for (const auto& n : opt->get_lnames()) known.insert(n);
    }
  }
  for (const auto& [key, value] : cfg) {
    if (!known.count(key) || key == "config" || key == "help") {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  for (auto* a : {&app, active}) {
    if (a == nullptr) continue;
    for (auto* opt : a->get_options()) {
      if (opt->count() > 0) continue;
      for (const auto& n : opt->get_lnames()) {
        auto it = cfg.find(n);
        if (it == cfg.end() || n == "config" || n == "help") continue;
        opt->add_result(it->second);
        opt->run_callback();
        break;
      }
    }
  }
}

void add_train_options(CLI::App* sub, Options& o, bool sgns) {
  sub->add_option("--stats", o.stats, "Co-occurrence statistics (filtered for DIVE)");
  sub->add_option("--output", o.output, "Word embedding output");
  sub->add_option("--contexts-output", o.contexts_output, "Context embedding output");
  sub->add_option("--dim", o.hyper.dim, "Embedding size L")->capture_default_str();
  sub->add_option("--epochs", o.hyper.epochs)->capture_default_str();
  sub->add_option("--learning-rate", o.hyper.learning_rate)->capture_default_str();
  sub->add_option("--batch-size", o.hyper.batch_size)->capture_default_str();
  if (sgns) {
    sub->add_option("--negatives", o.hyper.negatives, "Negatives per positive k'")->capture_default_str();
    sub->add_option("--unigram-power", o.hyper.unigram_power)->capture_default_str();
  } else {
    sub->add_option("--k-inclusion", o.hyper.k_inclusion, "Negative sampling weight k_I")
        ->capture_default_str();
  }
  sub->add_flag("--check-invariants", o.hyper.check_invariants,
                "Verify non-negativity after every update (slow)");
}

void cmd_preprocess(Options& o, std::ostream& out) {
  require(o.input, "input");
  require(o.output, "output");
  PreprocessConfig cfg;
  cfg.chunk_length = o.chunk_length;
  cfg.max_tokens = o.max_tokens;
  if (o.no_stopwords) {
    cfg.stopwords.clear();
  } else if (!o.stopwords.empty()) {
    cfg.stopwords = load_stopwords(o.stopwords);
  }
  const auto mode = parse_pos_mode(o.pos);
  if (!mode) throw ConfigError("unknown POS mode '" + o.pos + "'");
  cfg.pos_mode = *mode;
  auto in = open_in(o.input);
  const auto stream = preprocess(in, cfg);
  auto file = open_out(o.output);
  write_token_stream(file, stream);
  finish_write(file, o.output);
  out << "tokens=" << stream.token_count() << " chunks=" << stream.chunks.size() << '\n';
}

void cmd_vocab(Options& o, std::ostream& out) {
  require(o.input, "input");
  require(o.output, "output");
  auto in = open_in(o.input);
  const auto stream = read_token_stream(in);
  const auto vocab = build_vocab(stream, o.min_count);
  auto file = open_out(o.output);
  vocab.save(file);
  finish_write(file, o.output);
  out << "vocab_size=" << vocab.size() << " tokens=" << stream.token_count()
      << " kept_tokens=" << vocab.total_count() << '\n';
  if (!o.retained.empty()) {
    auto r = open_out(o.retained);
    write_token_stream(r, retain_vocabulary(stream, vocab));
    finish_write(r, o.retained);
  }
}

void cmd_cooc(Options& o, std::ostream& out) {
  require(o.input, "input");
  require(o.vocab, "vocab");
  require(o.output, "output");
  auto vin = open_in(o.vocab);
  const auto vocab = Vocabulary::load(vin, o.vocab);
  auto in = open_in(o.input);
  const auto encoded = encode(read_token_stream(in), vocab);
  const auto stats = count_cooccurrences(encoded, vocab, Window::symmetric(o.window), o.threads);
  auto file = open_out(o.output);
  save_cooc(file, stats);
  finish_write(file, o.output);
  out << "vocab_size=" << stats.vocab_size() << " pairs=" << stats.total()
      << " nonzeros=" << stats.nonzeros() << " Z=" << fixed(stats.avg_freq()) << '\n';
}

void cmd_filter(Options& o, std::ostream& out) {
  require(o.input, "input");
  require(o.output, "output");
  const auto stats = load_cooc_file(o.input);
  const auto filtered = pmi_filter(stats, o.k_filter);
  auto file = open_out(o.output);
  save_cooc(file, filtered);
  finish_write(file, o.output);
  out << "k_f=" << o.k_filter << " pairs=" << filtered.total() << " of " << stats.total()
      << " nonzeros=" << filtered.nonzeros() << " of " << stats.nonzeros() << '\n';
}

void cmd_sbow(Options& o, std::ostream& out) {
  require(o.input, "input");
  require(o.output, "output");
  const auto stats = load_cooc_file(o.input);
  const auto kind = parse_space_kind(o.kind);
  FeatureSpace space;
  if (kind == SpaceKind::kFreq) {
    space = build_freq(stats);
  } else if (kind == SpaceKind::kPpmi) {
    space = build_ppmi(stats);
  } else if (kind == SpaceKind::kPpmiIs) {
    space = build_ppmi_is(stats);
  } else {
    throw ConfigError("sbow --kind must be freq, ppmi or ppmi_is (use kmeans-nmf for freq_nmf)");
  }
  auto file = open_out(o.output);
  save_space(file, space);
  finish_write(file, o.output);
  std::size_t nnz = 0;
  for (const auto& r : space.rows) nnz += r.size();
  out << "kind=" << to_string(space.kind) << " rows=" << space.rows.size() << " nonzeros=" << nnz
      << '\n';
}

void cmd_train(Options& o, std::ostream& out, std::ostream& err, bool sgns) {
  require(o.stats, "stats");
  require(o.output, "output");
  const auto stats = load_cooc_file(o.stats);
  if (!sgns && stats.filter_threshold() == 0.0) {
    err << "warning: training DIVE on unfiltered statistics\n";
  }
  auto hyper = o.hyper;
  hyper.threads = o.threads;
  hyper.k_filter = stats.filter_threshold();
  hyper.seed = resolve_seed(o, out);
  auto progress = [&err](const EpochReport& r) {
    err << "epoch " << r.epoch << " positives=" << r.positives << " negatives=" << r.negatives
        << " objective=" << r.objective_estimate << '\n';
  };
  const auto result = sgns ? train_sgns(stats, hyper, progress) : train_dive(stats, hyper, progress);
  auto file = open_out(o.output);
  save_embedding(file, result.embedding);
  finish_write(file, o.output);
  if (!o.contexts_output.empty()) {
    auto ctx = open_out(o.contexts_output);
    save_context_vectors(ctx, result.embedding);
    finish_write(ctx, o.contexts_output);
  }
  std::size_t zero_rows = 0;
  for (std::size_t i = 0; i < result.embedding.vocab_size(); ++i) {
    const auto w = result.embedding.word(i);
    zero_rows += std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; });
  }
  out << "kind=" << to_string(result.embedding.kind) << " words=" << result.embedding.vocab_size()
      << " dim=" << result.embedding.dim << " epochs=" << result.epochs.size()
      << " zero_rows=" << zero_rows << '\n';
}

void cmd_kmeans(Options& o, std::ostream& out) {
  require(o.sgns, "sgns");
  require(o.stats, "stats");
  require(o.output, "output");
  const auto emb = load_embedding_file(o.sgns);
  const auto stats = load_cooc_file(o.stats);
  auto options = o.kmeans;
  options.seed = resolve_seed(o, out);
  const auto space = kmeans_freq_nmf(emb, stats, options);
  auto file = open_out(o.output);
  save_space(file, space);
  finish_write(file, o.output);
  out << "kind=freq_nmf rows=" << space.rows.size() << " clusters=" << space.dims() << '\n';
}

std::vector<ScorerKind> parse_scorers(const std::vector<std::string>& names) {
  std::vector<ScorerKind> kinds;
  for (const auto& n : names) {
    const auto k = parse_scorer(n);
    if (!k) throw ConfigError("unknown scorer '" + n + "'");
    kinds.push_back(*k);
  }
  if (kinds.empty()) throw UsageError("no scorer given");
  return kinds;
}

ScorerParams scorer_params(const Options& o) {
  ScorerParams p;
  p.al1_w0 = o.w0;
  p.slqs_top_n = o.top_n;
  p.random_seed = o.seed;
  return p;
}

void cmd_score(Options& o, std::ostream& out) {
  require(o.space, "space");
  require(o.pairs, "pairs");
  const auto kinds = parse_scorers(o.scorers);
  if (kinds.size() != 1) throw UsageError("score takes exactly one --scorer");
  if (kinds[0] == ScorerKind::kRandom) resolve_seed(o, out);
  const auto space = load_vector_space(o.space);
  std::optional<VectorSpace> sgns;
  if (!o.sgns.empty()) sgns = load_vector_space(o.sgns);
  const Scorer scorer(kinds[0], &space, sgns ? &*sgns : nullptr, scorer_params(o));

  Dataset ds;
  auto in = open_in(o.pairs);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() < 2) throw ParseError(o.pairs, line_no, "expected word1<TAB>word2");
    ds.pairs.push_back(make_dataset_pair(trim(fields[0]), trim(fields[1])));
  }
  const auto ranking = rank_pairs(ds, scorer);
  std::vector<const RankedPair*> by_input(ranking.size());
  for (const auto& r : ranking) by_input[r.index] = &r;
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    out << ds.pairs[i].q_text << '\t' << ds.pairs[i].p_text << '\t';
    if (by_input[i]->oov) {
      out << "OOV\n";
    } else {
      out << by_input[i]->score << '\n';
    }
  }
}

void cmd_eval(Options& o, std::ostream& out) {
  require(o.space, "space");
  if (o.datasets.empty()) throw UsageError("missing required option --dataset");
  const auto kinds = parse_scorers(o.scorers);
  LabelMode mode = LabelMode::kAuto;
  if (o.label_mode == "detection") {
    mode = LabelMode::kDetection;
  } else if (o.label_mode == "graded") {
    mode = LabelMode::kGraded;
  } else if (o.label_mode != "auto") {
    throw ConfigError("--label-mode must be auto, detection or graded");
  }
  if (o.format != "kv" && o.format != "table") throw ConfigError("--format must be kv or table");
  const bool randomized =
      o.direction || std::find(kinds.begin(), kinds.end(), ScorerKind::kRandom) != kinds.end();
  if (randomized) resolve_seed(o, out);

  const auto space = load_vector_space(o.space);
  std::optional<VectorSpace> sgns;
  if (!o.sgns.empty()) sgns = load_vector_space(o.sgns);
  std::vector<Dataset> datasets;
  for (const auto& path : o.datasets) datasets.push_back(load_dataset_file(path, mode));

  std::vector<EvalReport> reports;
  const auto space_name = std::filesystem::path(o.space).stem().string();
  for (auto kind : kinds) {
    const Scorer scorer(kind, &space, sgns ? &*sgns : nullptr, scorer_params(o));
    EvalReport report{space_name, std::string(scorer_name(kind)), {}};
    for (const auto& ds : datasets) {
      if (o.direction) {
        DatasetResult r{ds.name, "direction", directionality_accuracy(ds, scorer, o.seed), ds.positives(), 0};
        report.results.push_back(r);
      } else {
        report.results.push_back(evaluate_dataset(ds, scorer));
      }
    }
    reports.push_back(std::move(report));
  }
  if (o.format == "table") {
    write_report_table(out, reports);
  } else {
    for (const auto& r : reports) write_report_kv(out, r);
  }
}

void cmd_topics(Options& o, std::ostream& out) {
  require(o.embedding, "embedding");
  const auto emb = load_embedding_file(o.embedding);
  if (o.general) {
    const std::size_t k = o.top_k_opt->count() ? o.top_k : 30;
    std::optional<std::string_view> q;
    if (!o.query.empty()) q = o.query;
    for (const auto& [w, v] : general_words(emb, q, k)) out << w << '\t' << v << '\n';
    return;
  }
  require(o.word, "word");
  const auto dims = topics(emb, o.word, o.top_k, o.min_value);
  write_topics(out, o.word, dims);
}

void write_dataset(const Dataset& ds, const std::string& path) {
  auto file = open_out(path);
  file << "word1\tword2\tlabel\n";
  for (const auto& p : ds.pairs) {
    file << p.q_text << '\t' << p.p_text << '\t' << (p.label > 0.5 ? "True" : "False") << '\n';
  }
  finish_write(file, path);
}

void cmd_synth(Options& o, std::ostream& out) {
  require(o.output, "output");
  const auto tax = make_synthetic_taxonomy(resolve_seed(o, out), o.taxonomy);
  auto file = open_out(o.output);
  file << tax.corpus;
  finish_write(file, o.output);
  if (!o.dataset_output.empty()) write_dataset(tax.dataset(true, true), o.dataset_output);
  if (!o.reversed_output.empty()) write_dataset(tax.reversed_planted(), o.reversed_output);
  out << "tokens=" << tax.token_count << " concepts=" << tax.concept_words.size()
      << " planted=" << tax.planted.size() << " random_negatives=" << tax.random_negatives.size()
      << " sibling_negatives=" << tax.sibling_negatives.size() << '\n';
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitUsage;
    case ErrorKind::kIo:
    case ErrorKind::kParse: return kExitIo;
    case ErrorKind::kNumeric:
    case ErrorKind::kInternal: return kExitNumeric;
  }
  return kExitNumeric;
}

std::map<std::string, std::string> parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
    const auto key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    cfg[std::string(key)] = std::string(trim(body.substr(eq + 1)));
  }
  return cfg;
}

std::vector<TopicDimension> topics(const Embedding& emb, std::string_view reference,
                                   std::size_t top_k, double min_value) {
  if (emb.kind != EmbeddingKind::kDive) throw ConfigError("topics needs a DIVE embedding");
  const auto index = word_index(emb);
  const auto it = index.find(std::string(reference));
  if (it == index.end()) throw ConfigError("reference word '" + std::string(reference) + "' not in embedding");
  const auto ref = emb.word(it->second);

  std::vector<std::size_t> order(emb.dim);
  for (std::size_t d = 0; d < emb.dim; ++d) order[d] = d;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ref[a] > ref[b]; });

  std::vector<TopicDimension> out;
  std::vector<std::size_t> words(emb.vocab_size());
  for (auto d : order) {
    if (ref[d] < min_value) break;
    for (std::size_t i = 0; i < words.size(); ++i) words[i] = i;
    const auto k = std::min(top_k, words.size());
    std::partial_sort(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(k), words.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double va = emb.word(a)[d], vb = emb.word(b)[d];
                        return va != vb ? va > vb : a < b;
                      });
    TopicDimension td{d, ref[d], {}};
    for (std::size_t i = 0; i < k; ++i) td.words.emplace_back(emb.words[words[i]], emb.word(words[i])[d]);
    out.push_back(std::move(td));
  }
  return out;
}

void write_topics(std::ostream& out, std::string_view reference, std::span<const TopicDimension> dims) {
  for (const auto& d : dims) {
    out << "dim " << d.dim << " (" << reference << '=' << fixed(d.reference_value, 4) << "):";
    for (const auto& [w, v] : d.words) out << ' ' << w << ':' << fixed(v, 4);
    out << '\n';
  }
}

std::vector<WordValue> general_words(const Embedding& emb, std::optional<std::string_view> query,
                                     std::size_t top_k) {
  std::vector<double> q;
  if (query) {
    const auto index = word_index(emb);
    const auto it = index.find(std::string(*query));
    if (it == index.end()) throw ConfigError("query word '" + std::string(*query) + "' not in embedding");
    const auto v = emb.word(it->second);
    q.assign(v.begin(), v.end());
  }
  std::vector<double> score(emb.vocab_size(), 0.0);
  for (std::size_t i = 0; i < emb.vocab_size(); ++i) {
    const auto w = emb.word(i);
    for (std::size_t d = 0; d < emb.dim; ++d) score[i] += q.empty() ? std::abs(w[d]) : w[d] * q[d];
  }
  std::vector<std::size_t> order(emb.vocab_size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto k = std::min(top_k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return score[a] != score[b] ? score[a] > score[b] : a < b; });
  std::vector<WordValue> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(emb.words[order[i]], score[order[i]]);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"DIVE hypernymy toolkit: corpus statistics, embeddings and evaluation", "dive"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "key=value file; flags override it");
  app.add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  o.seed_opt = app.add_option("--seed", o.seed, "Random seed (random and reported when omitted)");

  auto* pre = app.add_subcommand("preprocess", "Clean and chunk raw text");
  pre->add_option("--input", o.input, "Raw text corpus");
  pre->add_option("--output", o.output, "Token stream output");
  pre->add_option("--chunk-length", o.chunk_length)->capture_default_str();
  pre->add_option("--max-tokens", o.max_tokens, "0 = unlimited")->capture_default_str();
  pre->add_option("--stopwords", o.stopwords, "Stopword list, one per line");
  pre->add_flag("--no-stopwords", o.no_stopwords);
  pre->add_option("--pos", o.pos, "off, inline (word_TAG) or tsv")->capture_default_str();

  auto* voc = app.add_subcommand("vocab", "Count words and drop rare ones");
  voc->add_option("--input", o.input, "Token stream");
  voc->add_option("--output", o.output, "Vocabulary output");
  voc->add_option("--min-count", o.min_count)->capture_default_str();
  voc->add_option("--retained", o.retained, "Token stream restricted to the vocabulary");

  auto* cooc = app.add_subcommand("cooc", "Count windowed co-occurrences");
  cooc->add_option("--input", o.input, "Token stream");
  cooc->add_option("--vocab", o.vocab, "Vocabulary");
  cooc->add_option("--output", o.output, "Statistics output");
  cooc->add_option("--window", o.window, "Total window size (even)")->capture_default_str();

  auto* filt = app.add_subcommand("filter", "Drop pairs with PMI below log(k_f)");
  filt->add_option("--input", o.input, "Statistics");
  filt->add_option("--output", o.output, "Filtered statistics output");
  filt->add_option("--k-filter", o.k_filter)->capture_default_str();

  auto* sbow = app.add_subcommand("sbow", "Build a sparse bag-of-words space");
  sbow->add_option("--input", o.input, "Statistics");
  sbow->add_option("--kind", o.kind, "freq, ppmi or ppmi_is")->capture_default_str();
  sbow->add_option("--output", o.output, "Space output");

  auto* dive = app.add_subcommand("train-dive", "Train DIVE embeddings");
  add_train_options(dive, o, false);
  auto* sgns = app.add_subcommand("train-sgns", "Train skip-gram embeddings");
  add_train_options(sgns, o, true);

  auto* km = app.add_subcommand("kmeans-nmf", "Cluster contexts in skip-gram space and fold SBOW counts");
  km->add_option("--sgns", o.sgns, "Skip-gram embedding");
  km->add_option("--stats", o.stats, "Statistics");
  km->add_option("--output", o.output, "Space output");
  km->add_option("--clusters", o.kmeans.clusters)->capture_default_str();
  km->add_option("--kmeans-batch", o.kmeans.batch_size)->capture_default_str();
  km->add_option("--iterations", o.kmeans.iterations)->capture_default_str();

  auto add_scoring = [&o](CLI::App* sub) {
    sub->add_option("--space", o.space, "Embedding or sparse space");
    sub->add_option("--sgns", o.sgns, "Skip-gram embedding for word2vec and W.* scorers");
    sub->add_option("--w0", o.w0, "AL1 weight")->capture_default_str();
    sub->add_option("--top-n", o.top_n, "SLQS Sub context count")->capture_default_str();
  };
  auto* score = app.add_subcommand("score", "Score word pairs");
  add_scoring(score);
  score->add_option("--scorer", o.scorers, "Scoring function")->delimiter(',');
  score->add_option("--pairs", o.pairs, "TSV of word1, word2");

  auto* ev = app.add_subcommand("eval", "Evaluate scorers on datasets");
  add_scoring(ev);
  ev->add_option("--scorer", o.scorers, "Scoring functions")->delimiter(',');
  ev->add_option("--dataset", o.datasets, "Dataset TSV files")->delimiter(',');
  ev->add_option("--format", o.format, "kv or table")->capture_default_str();
  ev->add_option("--label-mode", o.label_mode, "auto, detection or graded")->capture_default_str();
  ev->add_flag("--direction", o.direction, "Directionality accuracy on hypernym pairs");

  auto* top = app.add_subcommand("topics", "Dump DIVE dimensions or general words");
  top->add_option("--embedding", o.embedding, "DIVE embedding");
  top->add_option("--word", o.word, "Reference word ordering the dimensions");
  o.top_k_opt = top->add_option("--top-k", o.top_k, "Words per dimension (30 for --general)");
  top->add_option("--min-value", o.min_value)->capture_default_str();
  top->add_flag("--general", o.general, "Rank words by w.q, or by |w|_1 without --query");
  top->add_option("--query", o.query, "Query word for --general");

  auto* syn = app.add_subcommand("synth", "Generate a synthetic taxonomy corpus");
  syn->add_option("--output", o.output, "Corpus output");
  syn->add_option("--dataset-output", o.dataset_output, "Planted pairs plus negatives");
  syn->add_option("--reversed-output", o.reversed_output, "Planted pairs swapped");
  syn->add_option("--concepts", o.taxonomy.concepts)->capture_default_str();
  syn->add_option("--roots", o.taxonomy.roots)->capture_default_str();
  syn->add_option("--tokens", o.taxonomy.tokens)->capture_default_str();
  syn->add_option("--own-contexts", o.taxonomy.own_contexts)->capture_default_str();
  syn->add_option("--noise-fraction", o.taxonomy.noise_fraction)->capture_default_str();
  syn->add_option("--noise-vocab", o.taxonomy.noise_vocab)->capture_default_str();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    CLI::App* active = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (!o.config.empty()) {
      auto in = open_in(o.config);
      try {
        apply_config(app, active, parse_config(in, o.config));
      } catch (const CLI::Error& e) {
        err << "error: config " << o.config << ": " << e.what() << '\n';
        return kExitUsage;
      }
    }
    if (o.threads == 0) throw ConfigError("--threads must be positive");

    const std::string name = active->get_name();
    if (name == "preprocess") cmd_preprocess(o, out);
    else if (name == "vocab") cmd_vocab(o, out);
    else if (name == "cooc") cmd_cooc(o, out);
    else if (name == "filter") cmd_filter(o, out);
    else if (name == "sbow") cmd_sbow(o, out);
    else if (name == "train-dive") cmd_train(o, out, err, false);
    else if (name == "train-sgns") cmd_train(o, out, err, true);
    else if (name == "kmeans-nmf") cmd_kmeans(o, out);
    else if (name == "score") cmd_score(o, out);
    else if (name == "eval") cmd_eval(o, out);
    else if (name == "topics") cmd_topics(o, out);
    else if (name == "synth") cmd_synth(o, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace dive::cli
