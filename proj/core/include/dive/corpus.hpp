#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dive {

using WordId = std::uint32_t;

// How part-of-speech information arrives with the text.
enum class PosMode {
  kOff,     // plain text
  kInline,  // whitespace-separated "word_TAG" tokens
  kTsv      // one "word<TAB>tag" pair per line
};

inline constexpr char kPosSeparator = '_';

std::optional<PosMode> parse_pos_mode(std::string_view name);

using StopwordSet = std::unordered_set<std::string>;

// Bundled English stopword list.
const StopwordSet& default_stopwords();
StopwordSet load_stopwords(const std::string& path);

struct PreprocessConfig {
  bool lowercase = true;
  StopwordSet stopwords = default_stopwords();
  std::size_t chunk_length = 100;
  std::size_t max_tokens = 0;  // 0 = unlimited
  PosMode pos_mode = PosMode::kOff;
};

// Cleaned tokens grouped into fixed-length chunks. Chunks replace sentences:
// co-occurrence windows never cross a chunk boundary.
struct TokenStream {
  std::vector<std::vector<std::string>> chunks;

  std::size_t token_count() const;
  bool operator==(const TokenStream&) const = default;
};

// Normalizes one whitespace-delimited token: strips non-alphabetic characters
// at both ends and returns the (optionally lowercased) remainder, or nullopt
// when the remainder is empty or contains a non-alphabetic character.
std::optional<std::string> normalize_token(std::string_view raw, bool lowercase = true);

// Splits on Unicode whitespace. Throws IoError on invalid UTF-8.
std::vector<std::string_view> split_whitespace(std::string_view line, std::size_t line_no = 0);

// Streaming preprocessor. Feed input line by line; completed chunks are handed
// to the sink (or collected when no sink is given).
class Preprocessor {
 public:
  using ChunkSink = std::function<void(std::vector<std::string>&&)>;

  explicit Preprocessor(PreprocessConfig config, ChunkSink sink = nullptr);

  // Returns false once max_tokens has been reached; further input is ignored.
  bool feed_line(std::string_view line);
  // Flushes the trailing partial chunk and returns collected chunks (empty when
  // a sink is in use).
  TokenStream finish();

  std::size_t tokens_emitted() const { return emitted_; }
  std::size_t lines_read() const { return line_no_; }

 private:
  void emit(std::string token);

  PreprocessConfig config_;
  ChunkSink sink_;
  TokenStream collected_;
  std::vector<std::string> current_;
  std::size_t emitted_ = 0;
  std::size_t line_no_ = 0;
  bool full_ = false;
};

TokenStream preprocess(std::string_view raw_text, const PreprocessConfig& config);
TokenStream preprocess(std::istream& in, const PreprocessConfig& config);

// Token stream file: one chunk per line, tokens separated by single spaces.
void write_token_stream(std::ostream& out, const TokenStream& stream);
TokenStream read_token_stream(std::istream& in);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Words must be distinct; ids follow the given order.
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::optional<WordId> id(std::string_view word) const;
  const std::string& word(WordId id) const { return words_[id]; }
  std::uint64_t count(WordId id) const { return counts_[id]; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total_count() const;

  void save(std::ostream& out) const;  // "word<TAB>count" per line
  static Vocabulary load(std::istream& in, const std::string& source = "<vocab>");

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

// Streaming token counter behind build_vocab.
class VocabCounter {
 public:
  void add(std::string_view token);
  void add_chunk(const std::vector<std::string>& chunk);
  // Keeps words seen at least min_count times, ordered by descending count then
  // lexicographically. Throws ConfigError when nothing survives.
  Vocabulary finish(std::uint64_t min_count) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

Vocabulary build_vocab(const TokenStream& stream, std::uint64_t min_count);

// Re-emits the stream with out-of-vocabulary tokens deleted. Chunk boundaries
// are kept; empty chunks are dropped.
TokenStream retain_vocabulary(const TokenStream& stream, const Vocabulary& vocab);

struct EncodedCorpus {
  std::vector<std::vector<WordId>> chunks;
  std::size_t token_count() const;
};

// Maps tokens to ids, deleting tokens missing from the vocabulary.
EncodedCorpus encode(const TokenStream& stream, const Vocabulary& vocab);
std::vector<WordId> encode_chunk(const std::vector<std::string>& chunk, const Vocabulary& vocab);

}  // namespace dive
