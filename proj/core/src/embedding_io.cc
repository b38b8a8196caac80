#include <istream>
#include <ostream>

#include "dive/embedding.hpp"
#include "dive/error.hpp"
#include "text_util.hpp"

namespace dive {

std::string_view to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::kDive ? "dive" : "sgns";
}

std::optional<EmbeddingKind> parse_embedding_kind(std::string_view name) {
  if (name == "dive") return EmbeddingKind::kDive;
  if (name == "sgns") return EmbeddingKind::kSgns;
  return std::nullopt;
}

Embedding::Embedding(std::vector<std::string> words_in, std::size_t dim_in, EmbeddingKind kind_in)
    : words(std::move(words_in)),
      dim(dim_in),
      kind(kind_in),
      word_vecs(words.size() * dim_in, 0.0),
      ctx_vecs(words.size() * dim_in, 0.0) {}

std::unordered_map<std::string, std::size_t> word_index(const Embedding& emb) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(emb.words.size());
  for (std::size_t i = 0; i < emb.words.size(); ++i) index.emplace(emb.words[i], i);
  return index;
}

namespace {

void write_matrix(std::ostream& out, const Embedding& emb, const std::vector<double>& m) {
  out << emb.words.size() << ' ' << emb.dim << ' ' << to_string(emb.kind) << '\n';
  std::string line;
  for (std::size_t w = 0; w < emb.words.size(); ++w) {
    line = emb.words[w];
    for (std::size_t i = 0; i < emb.dim; ++i) {
      line += ' ';
      detail::append_double(line, m[w * emb.dim + i]);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace

void save_embedding(std::ostream& out, const Embedding& emb) { write_matrix(out, emb, emb.word_vecs); }

void save_context_vectors(std::ostream& out, const Embedding& emb) {
  write_matrix(out, emb, emb.ctx_vecs);
}

Embedding load_embedding(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, line_no, "empty embedding file");
  const auto header = detail::split(detail::trim_cr(line), ' ');
  if (header.size() != 3) throw ParseError(source, line_no, "expected '<vocab_size> <L> <kind>'");
  const auto n = detail::parse_int<std::size_t>(header[0]);
  const auto dim = detail::parse_int<std::size_t>(header[1]);
  const auto kind = parse_embedding_kind(header[2]);
  if (!n || !dim || !kind || *dim == 0) throw ParseError(source, line_no, "bad embedding header");

  Embedding emb;
  emb.dim = *dim;
  emb.kind = *kind;
  emb.words.reserve(*n);
  emb.word_vecs.reserve(*n * *dim);
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim_cr(line);
    if (body.empty()) continue;
    const auto fields = detail::split(body, ' ');
    if (fields.size() != *dim + 1) {
      throw ParseError(source, line_no,
                       "expected word and " + std::to_string(*dim) + " values");
    }
    emb.words.emplace_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) throw ParseError(source, line_no, "bad value '" + std::string(fields[i]) + "'");
      emb.word_vecs.push_back(*v);
    }
  }
  if (emb.words.size() != *n) {
    throw ParseError(source, line_no, "header announces " + std::to_string(*n) + " words, found " +
                                          std::to_string(emb.words.size()));
  }
  emb.ctx_vecs.assign(emb.word_vecs.size(), 0.0);
  emb.hyper.dim = emb.dim;
  return emb;
}

}  // namespace dive
