#include <fstream>

#include "dive/corpus.hpp"
#include "dive/error.hpp"

namespace dive {

namespace {

constexpr const char* kEnglishStopwords[] = {
    "a",         "about",    "above",    "after",      "again",    "against",  "ain",
    "all",       "am",       "an",       "and",        "any",      "are",      "aren",
    "as",        "at",       "be",       "because",    "been",     "before",   "being",
    "below",     "between",  "both",     "but",        "by",       "can",      "couldn",
    "d",         "did",      "didn",     "do",         "does",     "doesn",    "doing",
    "don",       "down",     "during",   "each",       "few",      "for",      "from",
    "further",   "had",      "hadn",     "has",        "hasn",     "have",     "haven",
    "having",    "he",       "her",      "here",       "hers",     "herself",  "him",
    "himself",   "his",      "how",      "i",          "if",       "in",       "into",
    "is",        "isn",      "it",       "its",        "itself",   "just",     "ll",
    "m",         "ma",       "me",       "mightn",     "more",     "most",     "mustn",
    "my",        "myself",   "needn",    "no",         "nor",      "not",      "now",
    "o",         "of",       "off",      "on",         "once",     "only",     "or",
    "other",     "our",      "ours",     "ourselves",  "out",      "over",     "own",
    "re",        "s",        "same",     "shan",       "she",      "should",   "shouldn",
    "so",        "some",     "such",     "t",          "than",     "that",     "the",
    "their",     "theirs",   "them",     "themselves", "then",     "there",    "these",
    "they",      "this",     "those",    "through",    "to",       "too",      "under",
    "until",     "up",       "ve",       "very",       "was",      "wasn",     "we",
    "were",      "weren",    "what",     "when",       "where",    "which",    "while",
    "who",       "whom",     "why",      "will",       "with",     "won",      "wouldn",
    "y",         "you",      "your",     "yours",      "yourself", "yourselves"};

}  // namespace

const StopwordSet& default_stopwords() {
  static const StopwordSet set(std::begin(kEnglishStopwords), std::end(kEnglishStopwords));
  return set;
}

// One word per line; blank lines and lines starting with '#' are skipped.
StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_whitespace(line);
    if (words.empty() || words.front().front() == '#') continue;
    for (auto w : words) {
      std::string lower(w);
      for (auto& ch : lower) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      }
      set.insert(std::move(lower));
    }
  }
  return set;
}

}  // namespace dive
