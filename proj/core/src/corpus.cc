#include "dive/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "dive/error.hpp"

namespace dive {

namespace {

bool is_alpha(char ch) { return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z'); }

char to_lower(char ch) { return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch; }

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes one code point starting at s[i]; returns its byte length or 0 when
// the sequence is not valid UTF-8.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

}  // namespace

std::optional<PosMode> parse_pos_mode(std::string_view name) {
  if (name == "off") return PosMode::kOff;
  if (name == "inline") return PosMode::kInline;
  if (name == "tsv") return PosMode::kTsv;
  return std::nullopt;
}

std::size_t TokenStream::token_count() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.size();
  return n;
}

std::optional<std::string> normalize_token(std::string_view raw, bool lowercase) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && !is_alpha(raw[begin])) ++begin;
  while (end > begin && !is_alpha(raw[end - 1])) --end;
  if (begin == end) return std::nullopt;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    if (!is_alpha(raw[i])) return std::nullopt;
    out.push_back(lowercase ? to_lower(raw[i]) : raw[i]);
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < line.size()) {
    char32_t cp;
    const std::size_t len = decode_utf8(line, i, cp);
    if (len == 0) throw IoError("invalid UTF-8 at line " + std::to_string(line_no));
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        out.push_back(line.substr(start, i - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = i;
    }
    i += len;
  }
  if (start != std::string_view::npos) out.push_back(line.substr(start));
  return out;
}

Preprocessor::Preprocessor(PreprocessConfig config, ChunkSink sink)
    : config_(std::move(config)), sink_(std::move(sink)) {
  if (config_.chunk_length == 0) throw ConfigError("chunk_length must be positive");
}

void Preprocessor::emit(std::string token) {
  current_.push_back(std::move(token));
  ++emitted_;
  if (current_.size() == config_.chunk_length) {
    if (sink_) {
      sink_(std::move(current_));
    } else {
      collected_.chunks.push_back(std::move(current_));
    }
    current_ = {};
  }
  if (config_.max_tokens != 0 && emitted_ >= config_.max_tokens) full_ = true;
}

bool Preprocessor::feed_line(std::string_view line) {
  ++line_no_;
  if (full_) return false;
  const auto source = "input";

  auto keep_word = [&](std::string_view raw) -> std::optional<std::string> {
    auto word = normalize_token(raw, config_.lowercase);
    if (!word) return std::nullopt;
    // Stopwords are matched on the lowercased surface word.
    std::string probe = *word;
    for (auto& ch : probe) ch = to_lower(ch);
    if (config_.stopwords.count(probe)) return std::nullopt;
    return word;
  };

  switch (config_.pos_mode) {
    case PosMode::kOff:
      for (auto raw : split_whitespace(line, line_no_)) {
        if (auto word = keep_word(raw)) {
          emit(std::move(*word));
          if (full_) break;
        }
      }
      break;
    case PosMode::kInline:
      for (auto raw : split_whitespace(line, line_no_)) {
        const auto sep = raw.rfind(kPosSeparator);
        if (sep == std::string_view::npos || sep == 0 || sep + 1 == raw.size()) {
          throw ParseError(source, line_no_,
                           "malformed word_TAG token '" + std::string(raw) + "'");
        }
        if (auto word = keep_word(raw.substr(0, sep))) {
          emit(*word + kPosSeparator + std::string(raw.substr(sep + 1)));
          if (full_) break;
        }
      }
      break;
    case PosMode::kTsv: {
      // Blank lines separate sentences in tagger output and carry no token.
      if (split_whitespace(line, line_no_).empty()) break;
      std::string_view body = line;
      if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
      const auto tab = body.find('\t');
      if (tab == std::string_view::npos || tab == 0 || tab + 1 == body.size() ||
          body.find('\t', tab + 1) != std::string_view::npos) {
        throw ParseError(source, line_no_, "expected two tab-separated columns (word, tag)");
      }
      const auto tag = body.substr(tab + 1);
      if (split_whitespace(tag, line_no_).size() != 1) {
        throw ParseError(source, line_no_, "malformed tag '" + std::string(tag) + "'");
      }
      if (auto word = keep_word(body.substr(0, tab))) {
        emit(*word + kPosSeparator + std::string(tag));
      }
      break;
    }
  }
  return !full_;
}

TokenStream Preprocessor::finish() {
  if (!current_.empty()) {
    if (sink_) {
      sink_(std::move(current_));
    } else {
      collected_.chunks.push_back(std::move(current_));
    }
    current_ = {};
  }
  return std::move(collected_);
}

TokenStream preprocess(std::string_view raw_text, const PreprocessConfig& config) {
  Preprocessor pre(config);
  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    auto nl = raw_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw_text.size();
    if (!pre.feed_line(raw_text.substr(pos, nl - pos))) break;
    pos = nl + 1;
  }
  return pre.finish();
}

TokenStream preprocess(std::istream& in, const PreprocessConfig& config) {
  Preprocessor pre(config);
  std::string line;
  while (std::getline(in, line)) {
    if (!pre.feed_line(line)) break;
  }
  return pre.finish();
}

void write_token_stream(std::ostream& out, const TokenStream& stream) {
  for (const auto& chunk : stream.chunks) {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (i) out << ' ';
      out << chunk[i];
    }
    out << '\n';
  }
}

TokenStream read_token_stream(std::istream& in) {
  TokenStream stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> chunk;
    for (auto tok : split_whitespace(line, line_no)) chunk.emplace_back(tok);
    if (!chunk.empty()) stream.chunks.push_back(std::move(chunk));
  }
  return stream;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) throw InternalError("vocabulary words/counts size mismatch");
  index_.reserve(words_.size());
  for (WordId i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw ConfigError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<WordId> Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::total_count() const {
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << counts_[i] << '\n';
}

Vocabulary Vocabulary::load(std::istream& in, const std::string& source) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(source, line_no, "expected word<TAB>count");
    }
    std::uint64_t count = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) throw ParseError(source, line_no, "bad count");
    words.push_back(line.substr(0, tab));
    counts.push_back(count);
  }
  try {
    return Vocabulary(std::move(words), std::move(counts));
  } catch (const ConfigError& e) {
    throw ParseError(source, line_no, e.what());
  }
}

void VocabCounter::add(std::string_view token) { ++counts_[std::string(token)]; }

void VocabCounter::add_chunk(const std::vector<std::string>& chunk) {
  for (const auto& tok : chunk) ++counts_[tok];
}

Vocabulary VocabCounter::finish(std::uint64_t min_count) const {
  if (min_count == 0) throw ConfigError("min_count must be at least 1");
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [word, count] : counts_) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) {
    throw ConfigError("no word occurs at least " + std::to_string(min_count) + " times");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(kept.size());
  counts.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    counts.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

Vocabulary build_vocab(const TokenStream& stream, std::uint64_t min_count) {
  VocabCounter counter;
  for (const auto& chunk : stream.chunks) counter.add_chunk(chunk);
  return counter.finish(min_count);
}

TokenStream retain_vocabulary(const TokenStream& stream, const Vocabulary& vocab) {
  TokenStream out;
  for (const auto& chunk : stream.chunks) {
    std::vector<std::string> kept;
    for (const auto& tok : chunk) {
      if (vocab.id(tok)) kept.push_back(tok);
    }
    if (!kept.empty()) out.chunks.push_back(std::move(kept));
  }
  return out;
}

std::size_t EncodedCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.size();
  return n;
}

std::vector<WordId> encode_chunk(const std::vector<std::string>& chunk, const Vocabulary& vocab) {
  std::vector<WordId> ids;
  ids.reserve(chunk.size());
  for (const auto& tok : chunk) {
    if (auto id = vocab.id(tok)) ids.push_back(*id);
  }
  return ids;
}

EncodedCorpus encode(const TokenStream& stream, const Vocabulary& vocab) {
  EncodedCorpus out;
  out.chunks.reserve(stream.chunks.size());
  for (const auto& chunk : stream.chunks) {
    auto ids = encode_chunk(chunk, vocab);
    if (!ids.empty()) out.chunks.push_back(std::move(ids));
  }
  return out;
}

}  // namespace dive
