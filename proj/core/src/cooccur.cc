#include "dive/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "dive/error.hpp"
#include "text_util.hpp"

namespace dive {

Window Window::symmetric(std::uint32_t total) {
  if (total == 0 || total % 2 != 0) {
    throw ConfigError("window size must be a positive even number, got " + std::to_string(total));
  }
  return {total / 2, total / 2};
}

CoocStats::CoocStats(std::vector<std::string> words, Window window,
                     std::vector<std::vector<CoocEntry>> rows, double avg_freq,
                     double filter_threshold)
    : words_(std::move(words)), window_(window), filter_threshold_(filter_threshold) {
  const std::size_t v = words_.size();
  if (rows.size() != v) throw InternalError("cooc rows/vocabulary size mismatch");
  word_marginal_.assign(v, 0);
  context_marginal_.assign(v, 0);
  offsets_.assign(v + 1, 0);
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  entries_.reserve(nnz);
  for (std::size_t w = 0; w < v; ++w) {
    auto& r = rows[w];
    std::sort(r.begin(), r.end(), [](const CoocEntry& a, const CoocEntry& b) {
      return a.context < b.context;
    });
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto& e = r[i];
      if (e.context >= v) throw InternalError("context id out of range");
      if (i > 0 && r[i - 1].context == e.context) throw InternalError("duplicate context in row");
      if (e.count == 0) continue;
      entries_.push_back(e);
      word_marginal_[w] += e.count;
      context_marginal_[e.context] += e.count;
      total_ += e.count;
    }
    offsets_[w + 1] = entries_.size();
  }
  avg_freq_ = avg_freq >= 0.0 ? avg_freq
                              : (v == 0 ? 0.0 : static_cast<double>(total_) / static_cast<double>(v));
}

std::uint64_t CoocStats::count(WordId w, WordId c) const {
  auto r = row(w);
  auto it = std::lower_bound(r.begin(), r.end(), c,
                             [](const CoocEntry& e, WordId id) { return e.context < id; });
  return (it != r.end() && it->context == c) ? it->count : 0;
}

std::vector<std::vector<CoocEntry>> CoocStats::to_rows() const {
  std::vector<std::vector<CoocEntry>> rows(vocab_size());
  for (WordId w = 0; w < vocab_size(); ++w) {
    auto r = row(w);
    rows[w].assign(r.begin(), r.end());
  }
  return rows;
}

bool CoocStats::operator==(const CoocStats& other) const {
  return words_ == other.words_ && window_ == other.window_ && offsets_ == other.offsets_ &&
         entries_ == other.entries_ && total_ == other.total_ &&
         avg_freq_ == other.avg_freq_ && filter_threshold_ == other.filter_threshold_;
}

CoocCounter::CoocCounter(std::size_t vocab_size, Window window)
    : vocab_size_(vocab_size), window_(window) {}

void CoocCounter::add_chunk(std::span<const WordId> chunk) {
  const std::size_t n = chunk.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t w = chunk[i];
    if (w >= vocab_size_) throw InternalError("token id outside the vocabulary");
    const std::size_t lo = i >= window_.left ? i - window_.left : 0;
    const std::size_t hi = std::min(n, i + window_.right + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (j == i) continue;
      ++counts_[(w << 32) | chunk[j]];
    }
  }
}

void CoocCounter::merge(const CoocCounter& other) {
  for (const auto& [key, count] : other.counts_) counts_[key] += count;
}

CoocStats CoocCounter::finish(std::vector<std::string> words) const {
  if (words.size() != vocab_size_) throw InternalError("vocabulary size mismatch in counter");
  std::vector<std::vector<CoocEntry>> rows(vocab_size_);
  for (const auto& [key, count] : counts_) {
    rows[key >> 32].push_back({static_cast<WordId>(key & 0xFFFFFFFFu), count});
  }
  return CoocStats(std::move(words), window_, std::move(rows));
}

CoocStats count_cooccurrences(const EncodedCorpus& corpus, const Vocabulary& vocab,
                              Window window, unsigned threads) {
  if (window.size() == 0) throw ConfigError("window must be positive");
  threads = std::max(1u, threads);
  const std::size_t n = corpus.chunks.size();
  if (threads == 1 || n < 2 * threads) {
    CoocCounter counter(vocab.size(), window);
    for (const auto& chunk : corpus.chunks) counter.add_chunk(chunk);
    return counter.finish(vocab.words());
  }
  std::vector<CoocCounter> partial(threads, CoocCounter(vocab.size(), window));
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const std::size_t begin = n * t / threads;
      const std::size_t end = n * (t + 1) / threads;
      for (std::size_t i = begin; i < end; ++i) partial[t].add_chunk(corpus.chunks[i]);
    });
  }
  for (auto& th : workers) th.join();
  for (unsigned t = 1; t < threads; ++t) partial[0].merge(partial[t]);
  return partial[0].finish(vocab.words());
}

double pmi_from_counts(std::uint64_t pair, std::uint64_t word, std::uint64_t context,
                       std::uint64_t total) {
  if (pair == 0) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(pair)) + std::log(static_cast<double>(total)) -
         std::log(static_cast<double>(word)) - std::log(static_cast<double>(context));
}

double pmi(const CoocStats& stats, WordId w, WordId c) {
  return pmi_from_counts(stats.count(w, c), stats.word_marginal(w), stats.context_marginal(c),
                         stats.total());
}

void save_cooc(std::ostream& out, const CoocStats& stats) {
  out << "#dive-cooc\t1\n";
  out << "#window\t" << stats.window().left << '\t' << stats.window().right << '\n';
  out << "#vocab_size\t" << stats.vocab_size() << '\n';
  out << "#total\t" << stats.total() << '\n';
  out << "#avg_freq\t" << detail::format_double(stats.avg_freq()) << '\n';
  out << "#filter\t" << detail::format_double(stats.filter_threshold()) << '\n';
  for (const auto& w : stats.words()) out << "#word\t" << w << '\n';
  const auto& words = stats.words();
  for (WordId w = 0; w < stats.vocab_size(); ++w) {
    for (const auto& e : stats.row(w)) {
      out << words[w] << '\t' << words[e.context] << '\t' << e.count << '\n';
    }
  }
}

CoocStats load_cooc(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  Window window{};
  bool have_window = false;
  std::size_t vocab_size = 0;
  std::uint64_t total = 0;
  double avg_freq = -1.0;
  double filter = 0.0;
  std::vector<std::string> words;
  std::unordered_map<std::string, WordId> index;
  std::vector<std::vector<CoocEntry>> rows;
  bool header_done = false;
  bool have_magic = false;

  auto fail = [&](const std::string& msg) -> ParseError { return ParseError(source, line_no, msg); };

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim_cr(line);
    if (body.empty()) continue;
    const auto fields = detail::split(body, '\t');
    if (body.front() == '#') {
      if (header_done) throw fail("header line after data");
      const auto key = fields[0];
      if (key == "#dive-cooc") {
        have_magic = true;
      } else if (key == "#window" && fields.size() == 3) {
        auto l = detail::parse_int<std::uint32_t>(fields[1]);
        auto r = detail::parse_int<std::uint32_t>(fields[2]);
        if (!l || !r) throw fail("bad window");
        window = {*l, *r};
        have_window = true;
      } else if (key == "#vocab_size" && fields.size() == 2) {
        auto v = detail::parse_int<std::size_t>(fields[1]);
        if (!v) throw fail("bad vocab_size");
        vocab_size = *v;
      } else if (key == "#total" && fields.size() == 2) {
        auto v = detail::parse_int<std::uint64_t>(fields[1]);
        if (!v) throw fail("bad total");
        total = *v;
      } else if (key == "#avg_freq" && fields.size() == 2) {
        auto v = detail::parse_double(fields[1]);
        if (!v) throw fail("bad avg_freq");
        avg_freq = *v;
      } else if (key == "#filter" && fields.size() == 2) {
        auto v = detail::parse_double(fields[1]);
        if (!v) throw fail("bad filter");
        filter = *v;
      } else if (key == "#word" && fields.size() == 2) {
        if (!index.emplace(std::string(fields[1]), static_cast<WordId>(words.size())).second) {
          throw fail("duplicate word '" + std::string(fields[1]) + "'");
        }
        words.emplace_back(fields[1]);
      } else {
        throw fail("unknown header line");
      }
      continue;
    }
    if (!header_done) {
      if (!have_magic || !have_window) throw fail("missing #dive-cooc header");
      if (words.size() != vocab_size) throw fail("#word count does not match #vocab_size");
      rows.resize(vocab_size);
      header_done = true;
    }
    if (fields.size() != 3) throw fail("expected word<TAB>context<TAB>count");
    auto w = index.find(std::string(fields[0]));
    auto c = index.find(std::string(fields[1]));
    if (w == index.end() || c == index.end()) throw fail("word not in #word header");
    auto count = detail::parse_int<std::uint64_t>(fields[2]);
    if (!count) throw fail("bad count");
    rows[w->second].push_back({c->second, *count});
  }
  if (!have_magic) throw ParseError(source, line_no, "missing #dive-cooc header");
  if (!header_done) {
    if (words.size() != vocab_size) throw ParseError(source, line_no, "#word count mismatch");
    rows.resize(vocab_size);
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.context < b.context; });
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (r[i].context == r[i - 1].context) throw ParseError(source, line_no, "duplicate pair");
    }
  }
  CoocStats stats(std::move(words), window, std::move(rows), avg_freq, filter);
  if (stats.total() != total) {
    throw ParseError(source, line_no, "pair counts do not sum to #total");
  }
  return stats;
}

}  // namespace dive
