#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dive/embedding.hpp"
#include "dive/error.hpp"

namespace dive::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;

int exit_code(ErrorKind kind);

// Flat "key = value" lines; blank lines and lines starting with '#' are
// skipped. Later keys override earlier ones.
std::map<std::string, std::string> parse_config(std::istream& in, const std::string& source);

// Runs one command line (argv[0] is the program name) and returns the exit
// code. Reports go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

using WordValue = std::pair<std::string, double>;

struct TopicDimension {
  std::size_t dim = 0;
  double reference_value = 0.0;
  std::vector<WordValue> words;  // descending by value, ties by vocabulary order
};

// Dimensions ordered by the reference word's value (descending), dropping
// those below min_value; each lists the top_k words by value in that dimension.
std::vector<TopicDimension> topics(const Embedding& emb, std::string_view reference,
                                   std::size_t top_k, double min_value = 0.1);
void write_topics(std::ostream& out, std::string_view reference,
                  std::span<const TopicDimension> dims);

// Words ranked by w.q for a query word, or by ||w||_1 without one.
std::vector<WordValue> general_words(const Embedding& emb, std::optional<std::string_view> query,
                                     std::size_t top_k);

}  // namespace dive::cli
