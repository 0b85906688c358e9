#pragma once

// Embedding quality metrics. Every function takes a column-per-word matrix:
// rows are dimensions, columns are words. Dense inputs (d x |V|) and
// learned sparse codes (|V| x |V|) are both accepted.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "swsr/embedding_io.hpp"
#include "swsr/linalg.hpp"
#include "swsr/matrix.hpp"

namespace swsr {

// Fraction of entries that are exactly zero. For square matrices the
// structurally-zero diagonal is left out of both counts.
double sparsity_ratio(const Matrix& s);

// The k words with the largest value in row `dimension`, descending, ties by
// ascending word index. Throws kConfigError unless k < |V|.
std::vector<std::size_t> top_k_words(const Matrix& s, std::size_t dimension, std::size_t k);

struct IntrusionConfig {
  std::size_t k = 5;
  double bottom_fraction = 0.5;  // intruder comes from this lower share of the dimension
  double top_fraction = 0.1;     // and must rank within this share of another dimension
  std::uint64_t seed = 0;

  // Throws kConfigError.
  void validate(std::size_t vocab_size) const;
  std::size_t bottom_count(std::size_t vocab_size) const;  // floor(bottom_fraction * |V|)
  std::size_t top_count(std::size_t vocab_size) const;     // ceil(top_fraction * |V|)
};

struct IntrusionInstance {
  std::size_t dimension = 0;
  std::vector<std::size_t> top_words;
  std::size_t intruder = 0;
};

// Words in the bottom share of `dimension` that rank in the top share of at
// least one other dimension, ascending by index.
std::vector<std::size_t> intruder_candidates(const Matrix& s, std::size_t dimension,
                                             const IntrusionConfig& config);

// The generator dist_ratio() uses for `dimension`.
std::mt19937_64 intruder_rng(std::uint64_t seed, std::size_t dimension);

// Uniform draw from intruder_candidates(). Throws kNoIntruderAvailable.
std::size_t select_intruder(const Matrix& s, std::size_t dimension, const IntrusionConfig& config,
                            std::mt19937_64& rng);

struct DimensionScore {
  IntrusionInstance instance;
  double intra_dist = 0.0;  // mean pairwise distance among top words
  double inter_dist = 0.0;  // mean distance from top words to the intruder
  double ratio = 0.0;       // inter / intra
};

// Scores one dimension given its top words and intruder; distances are
// Euclidean between whole word columns.
DimensionScore score_dimension(const Matrix& s, const IntrusionInstance& instance);

struct DistRatioReport {
  double overall = 0.0;
  std::vector<DimensionScore> dimensions;  // only the dimensions that were scored
  std::vector<std::size_t> no_intruder;    // skipped: empty candidate set
  std::vector<std::size_t> zero_intra;     // skipped: top words coincide
  std::vector<std::string> warnings;
};

// Throws kMetricUndefined when no dimension can be scored.
DistRatioReport dist_ratio(const Matrix& s, const IntrusionConfig& config,
                           Determinism mode = Determinism::kStrict);

// Mean over words of |topk_a(word) & topk_b(word)| / k, where topk ranks a
// word's dimensions by value with ties by ascending dimension index.
double stability_overlap(const Matrix& a, const Matrix& b, std::size_t k);

struct LabeledDocument {
  std::vector<std::string> tokens;
  std::size_t label = 0;
  std::size_t line = 0;
};

struct LabeledCorpus {
  std::vector<LabeledDocument> documents;
  std::vector<std::string> classes;  // first-appearance order
};

// `label<TAB>text` per line; blank lines skipped.
LabeledCorpus parse_labeled_corpus(std::istream& in);
LabeledCorpus read_labeled_corpus(const std::string& path);

// Row per document: mean of its known tokens' embedding columns. Unknown
// tokens are skipped; throws kUnknownDocument listing documents with no
// known token.
Matrix featurize(const Matrix& embeddings, const Vocabulary& vocab, const LabeledCorpus& corpus);

struct ClassifierConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  int epochs = 300;
  double learning_rate = 0.5;
};

struct ClassificationResult {
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Softmax regression on mean-of-embedding features, trained by full-batch
// gradient descent on a seeded split; returns held-out accuracy.
ClassificationResult downstream_eval(const Matrix& embeddings, const Vocabulary& vocab,
                                     const LabeledCorpus& corpus, const ClassifierConfig& config);

// Shortest %g rendering that always carries a decimal point ("1.0", not "1").
std::string format_metric(double value);

void write_metric_report(std::ostream& out,
                         const std::vector<std::pair<std::string, double>>& metrics);

// Columns `dim top_words intruder ratio`; words by name, comma-separated.
void write_dimension_table(std::ostream& out, const DistRatioReport& report,
                           const Vocabulary& vocab);

}  // namespace swsr
