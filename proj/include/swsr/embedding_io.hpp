#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "swsr/matrix.hpp"

namespace swsr {

// Ordered set of unique words; index i is the position in input order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws kDuplicateWord.
  explicit Vocabulary(std::vector<std::string> words);

  // Throws kDuplicateWord.
  std::size_t add(std::string word);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::string& word(std::size_t index) const { return words_.at(index); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::optional<std::size_t> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// X: d rows by |V| columns, column i is word i.
struct DenseEmbeddings {
  Matrix values;

  std::size_t dim() const noexcept { return values.rows(); }
  std::size_t vocab_size() const noexcept { return values.cols(); }
};

// |V| x |V| non-negative codes; column i is word i, row j is the dimension
// labelled by basis word j.
struct SparseEmbeddings {
  Matrix values;

  std::size_t vocab_size() const noexcept { return values.cols(); }
};

struct ParsedEmbeddings {
  Vocabulary vocab;
  DenseEmbeddings embeddings;
};

enum class SparseFormat { kDense, kTriplet };

// `word v1 ... vd` per line, any whitespace; blank lines are ignored.
ParsedEmbeddings parse_dense_embeddings(std::istream& in);
ParsedEmbeddings read_dense_embeddings(const std::string& path);

// `word dim:value ...` per line. The dimension count is the number of words.
ParsedEmbeddings parse_triplet_embeddings(std::istream& in);
ParsedEmbeddings read_triplet_embeddings(const std::string& path);

// Unit Euclidean norm per column; throws kZeroVector naming the word.
DenseEmbeddings l2_normalize(const DenseEmbeddings& x, const Vocabulary& vocab);

// Writes any column-per-word matrix in the dense text format, with 9
// significant digits per value and LF line endings.
void write_embeddings(const Vocabulary& vocab, const Matrix& values, std::ostream& out);

void write_sparse_embeddings(const Vocabulary& vocab, const SparseEmbeddings& s,
                             std::ostream& out, SparseFormat format);
void write_sparse_embeddings(const Vocabulary& vocab, const SparseEmbeddings& s,
                             const std::string& path, SparseFormat format);

std::optional<SparseFormat> parse_sparse_format(std::string_view name);

}  // namespace swsr
