#include "swsr/embedding_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "swsr/error.hpp"

namespace swsr {

Vocabulary::Vocabulary(std::vector<std::string> words) {
  for (auto& w : words) add(std::move(w));
}

std::size_t Vocabulary::add(std::string word) {
  const std::size_t next = words_.size();
  auto [it, inserted] = index_.emplace(word, next);
  if (!inserted) {
    throw Error(ErrorKind::kDuplicateWord,
                "'" + word + "' already at index " + std::to_string(it->second));
  }
  words_.push_back(std::move(word));
  return next;
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::kParseFailure, "line " + std::to_string(line_no) +
                                              ": bad numeric token '" + std::string(token) + "'");
  }
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open '" + path + "' for reading");
  return in;
}

std::string format_value(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

ParsedEmbeddings parse_dense_embeddings(std::istream& in) {
  Vocabulary vocab;
  std::vector<double> columns;  // word-major
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    const std::size_t d = tokens.size() - 1;
    if (vocab.empty()) {
      if (d == 0) {
        throw Error(ErrorKind::kInconsistentDimension,
                    "line " + std::to_string(line_no) + ": word has no values");
      }
      dim = d;
    } else if (d != dim) {
      throw Error(ErrorKind::kInconsistentDimension,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, found " + std::to_string(d));
    }
    for (std::size_t t = 1; t < tokens.size(); ++t) columns.push_back(parse_number(tokens[t], line_no));
    vocab.add(std::string(tokens[0]));
  }
  if (vocab.empty()) throw Error(ErrorKind::kEmptyInput, "no embedding lines found");

  Matrix x(dim, vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w)
    for (std::size_t r = 0; r < dim; ++r) x(r, w) = columns[w * dim + r];
  return {std::move(vocab), DenseEmbeddings{std::move(x)}};
}

ParsedEmbeddings read_dense_embeddings(const std::string& path) {
  auto in = open_input(path);
  return parse_dense_embeddings(in);
}

ParsedEmbeddings parse_triplet_embeddings(std::istream& in) {
  struct Entry {
    std::size_t dim;
    double value;
  };
  Vocabulary vocab;
  std::vector<std::vector<Entry>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    std::vector<Entry> row;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorKind::kParseFailure, "line " + std::to_string(line_no) +
                                                  ": expected dim:value, found '" +
                                                  std::string(tokens[t]) + "'");
      }
      const auto dim_token = tokens[t].substr(0, colon);
      std::size_t dim = 0;
      auto [ptr, ec] = std::from_chars(dim_token.data(), dim_token.data() + dim_token.size(), dim);
      if (ec != std::errc() || ptr != dim_token.data() + dim_token.size()) {
        throw Error(ErrorKind::kParseFailure, "line " + std::to_string(line_no) +
                                                  ": bad dimension index '" +
                                                  std::string(dim_token) + "'");
      }
      row.push_back({dim, parse_number(tokens[t].substr(colon + 1), line_no)});
    }
    vocab.add(std::string(tokens[0]));
    entries.push_back(std::move(row));
  }
  if (vocab.empty()) throw Error(ErrorKind::kEmptyInput, "no embedding lines found");

  const std::size_t n = vocab.size();
  Matrix s(n, n);
  for (std::size_t w = 0; w < n; ++w) {
    for (const auto& e : entries[w]) {
      if (e.dim >= n) {
        throw Error(ErrorKind::kInconsistentDimension,
                    "word '" + vocab.word(w) + "' references dimension " + std::to_string(e.dim) +
                        " but only " + std::to_string(n) + " dimensions exist");
      }
      s(e.dim, w) = e.value;
    }
  }
  return {std::move(vocab), DenseEmbeddings{std::move(s)}};
}

ParsedEmbeddings read_triplet_embeddings(const std::string& path) {
  auto in = open_input(path);
  return parse_triplet_embeddings(in);
}

DenseEmbeddings l2_normalize(const DenseEmbeddings& x, const Vocabulary& vocab) {
  DenseEmbeddings out = x;
  Matrix& m = out.values;
  for (std::size_t w = 0; w < m.cols(); ++w) {
    double sq = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sq += m(r, w) * m(r, w);
    if (sq == 0.0) {
      const std::string name = w < vocab.size() ? vocab.word(w) : "#" + std::to_string(w);
      throw Error(ErrorKind::kZeroVector, "word '" + name + "' has a zero vector");
    }
    const double norm = std::sqrt(sq);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, w) /= norm;
  }
  return out;
}

void write_embeddings(const Vocabulary& vocab, const Matrix& values, std::ostream& out) {
  if (vocab.size() != values.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "vocabulary has " + std::to_string(vocab.size()) +
                                               " words but matrix has " +
                                               std::to_string(values.cols()) + " columns");
  }
  std::string line;
  for (std::size_t w = 0; w < values.cols(); ++w) {
    line = vocab.word(w);
    for (std::size_t r = 0; r < values.rows(); ++r) {
      line += ' ';
      line += format_value(values(r, w), 9);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed");
}

void write_sparse_embeddings(const Vocabulary& vocab, const SparseEmbeddings& s,
                             std::ostream& out, SparseFormat format) {
  if (format == SparseFormat::kDense) {
    write_embeddings(vocab, s.values, out);
    return;
  }
  const Matrix& m = s.values;
  if (vocab.size() != m.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "vocabulary has " + std::to_string(vocab.size()) +
                                               " words but matrix has " +
                                               std::to_string(m.cols()) + " columns");
  }
  std::string line;
  for (std::size_t w = 0; w < m.cols(); ++w) {
    line = vocab.word(w);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (m(r, w) == 0.0) continue;
      line += ' ';
      line += std::to_string(r);
      line += ':';
      line += format_value(m(r, w), 6);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorKind::kIoFailure, "write failed");
}

void write_sparse_embeddings(const Vocabulary& vocab, const SparseEmbeddings& s,
                             const std::string& path, SparseFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot open '" + path + "' for writing");
  write_sparse_embeddings(vocab, s, out, format);
  out.flush();
  if (!out) throw Error(ErrorKind::kIoFailure, "write to '" + path + "' failed");
}

std::optional<SparseFormat> parse_sparse_format(std::string_view name) {
  if (name == "dense") return SparseFormat::kDense;
  if (name == "triplet") return SparseFormat::kTriplet;
  return std::nullopt;
}

}  // namespace swsr
