#include "swsr/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "swsr/error.hpp"
#include "swsr/kernels.hpp"
#include "swsr/parallel.hpp"

namespace swsr {
namespace {

// Slack for fraction * count products such as 0.1 * 30 = 3.0000000000000004.
constexpr double kCountSlack = 1e-9;

// Word indices of row `dimension`, best first, ties by ascending index.
std::vector<std::size_t> rank_row(const Matrix& s, std::size_t dimension) {
  std::vector<std::size_t> order(s.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto row = s.row(dimension);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  return order;
}

// Precomputed rankings shared by every dimension of one evaluation.
class RankTable {
 public:
  RankTable(const Matrix& s, std::size_t top_count) : top_count_(top_count) {
    const std::size_t dims = s.rows();
    orders_.reserve(dims);
    top_hits_.assign(s.cols(), 0);
    for (std::size_t d = 0; d < dims; ++d) {
      orders_.push_back(rank_row(s, d));
      for (std::size_t r = 0; r < top_count_; ++r) ++top_hits_[orders_.back()[r]];
    }
  }

  const std::vector<std::size_t>& order(std::size_t dimension) const { return orders_[dimension]; }

  std::vector<std::size_t> candidates(std::size_t dimension, std::size_t bottom_count) const {
    const auto& order = orders_[dimension];
    const std::size_t n = order.size();
    std::vector<std::size_t> out;
    for (std::size_t r = n - bottom_count; r < n; ++r) {
      const std::size_t word = order[r];
      // A bottom-share word is never in this dimension's top share unless
      // the two shares overlap; subtract that hit before testing.
      const std::size_t own = r < top_count_ ? 1 : 0;
      if (top_hits_[word] > own) out.push_back(word);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t top_count_;
  std::vector<std::vector<std::size_t>> orders_;
  std::vector<std::size_t> top_hits_;
};

std::size_t draw(const std::vector<std::size_t>& candidates, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

double euclidean(const Matrix& word_major, std::size_t a, std::size_t b) {
  return std::sqrt(kernels::active().squared_distance(word_major.row(a).data(),
                                                      word_major.row(b).data(),
                                                      word_major.cols()));
}

DimensionScore score_with(const Matrix& word_major, const IntrusionInstance& instance) {
  const auto& top = instance.top_words;
  const std::size_t k = top.size();
  double pair_sum = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pair_sum += euclidean(word_major, top[a], top[b]);
  double intruder_sum = 0.0;
  for (std::size_t a = 0; a < k; ++a) intruder_sum += euclidean(word_major, top[a], instance.intruder);

  DimensionScore score;
  score.instance = instance;
  // Ordered pairs count each unordered pair twice.
  score.intra_dist = 2.0 * pair_sum / static_cast<double>(k * (k - 1));
  score.inter_dist = intruder_sum / static_cast<double>(k);
  score.ratio = score.intra_dist > 0.0 ? score.inter_dist / score.intra_dist : 0.0;
  return score;
}

}  // namespace

double sparsity_ratio(const Matrix& s) {
  const bool skip_diagonal = s.is_square();
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) {
      if (skip_diagonal && r == c) continue;
      ++total;
      if (s(r, c) == 0.0) ++zeros;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

std::vector<std::size_t> top_k_words(const Matrix& s, std::size_t dimension, std::size_t k) {
  if (dimension >= s.rows())
    throw Error(ErrorKind::kConfigError, "dimension " + std::to_string(dimension) + " out of range");
  if (k >= s.cols())
    throw Error(ErrorKind::kConfigError, "k=" + std::to_string(k) + " must be below vocabulary size " +
                                             std::to_string(s.cols()));
  auto order = rank_row(s, dimension);
  order.resize(k);
  return order;
}

void IntrusionConfig::validate(std::size_t vocab_size) const {
  if (k < 2 || k >= vocab_size)
    throw Error(ErrorKind::kConfigError, "k=" + std::to_string(k) + " must satisfy 2 <= k < " +
                                             std::to_string(vocab_size));
  if (!(bottom_fraction > 0.0 && bottom_fraction < 1.0))
    throw Error(ErrorKind::kConfigError, "bottom fraction must lie in (0, 1)");
  if (!(top_fraction > 0.0 && top_fraction < 1.0))
    throw Error(ErrorKind::kConfigError, "top fraction must lie in (0, 1)");
}

std::size_t IntrusionConfig::bottom_count(std::size_t vocab_size) const {
  return static_cast<std::size_t>(std::floor(bottom_fraction * static_cast<double>(vocab_size) + kCountSlack));
}

std::size_t IntrusionConfig::top_count(std::size_t vocab_size) const {
  const auto count = static_cast<std::size_t>(
      std::ceil(top_fraction * static_cast<double>(vocab_size) - kCountSlack));
  return std::min(count, vocab_size);
}

std::vector<std::size_t> intruder_candidates(const Matrix& s, std::size_t dimension,
                                             const IntrusionConfig& config) {
  config.validate(s.cols());
  if (dimension >= s.rows())
    throw Error(ErrorKind::kConfigError, "dimension " + std::to_string(dimension) + " out of range");
  const RankTable table(s, config.top_count(s.cols()));
  return table.candidates(dimension, config.bottom_count(s.cols()));
}

std::mt19937_64 intruder_rng(std::uint64_t seed, std::size_t dimension) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(dimension),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(dimension) >> 32)};
  return std::mt19937_64(seq);
}

std::size_t select_intruder(const Matrix& s, std::size_t dimension, const IntrusionConfig& config,
                            std::mt19937_64& rng) {
  const auto candidates = intruder_candidates(s, dimension, config);
  if (candidates.empty())
    throw Error(ErrorKind::kNoIntruderAvailable, "dimension " + std::to_string(dimension));
  return draw(candidates, rng);
}

DimensionScore score_dimension(const Matrix& s, const IntrusionInstance& instance) {
  if (instance.top_words.size() < 2)
    throw Error(ErrorKind::kConfigError, "need at least two top words");
  return score_with(s.transposed(), instance);
}

DistRatioReport dist_ratio(const Matrix& s, const IntrusionConfig& config, Determinism mode) {
  config.validate(s.cols());
  const std::size_t dims = s.rows();
  const RankTable table(s, config.top_count(s.cols()));
  const std::size_t bottom = config.bottom_count(s.cols());
  const Matrix word_major = s.transposed();

  enum class Outcome { kScored, kNoIntruder, kZeroIntra };
  std::vector<Outcome> outcome(dims, Outcome::kScored);
  std::vector<DimensionScore> scores(dims);
  parallel_for(dims, mode, [&](std::size_t d) {
    const auto candidates = table.candidates(d, bottom);
    if (candidates.empty()) {
      outcome[d] = Outcome::kNoIntruder;
      return;
    }
    auto rng = intruder_rng(config.seed, d);
    IntrusionInstance instance;
    instance.dimension = d;
    const auto& order = table.order(d);
    instance.top_words.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.k));
    instance.intruder = draw(candidates, rng);
    scores[d] = score_with(word_major, instance);
    if (!(scores[d].intra_dist > 0.0)) outcome[d] = Outcome::kZeroIntra;
  });

  DistRatioReport report;
  double total = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    switch (outcome[d]) {
      case Outcome::kScored:
        total += scores[d].ratio;
        report.dimensions.push_back(std::move(scores[d]));
        break;
      case Outcome::kNoIntruder:
        report.no_intruder.push_back(d);
        break;
      case Outcome::kZeroIntra:
        report.zero_intra.push_back(d);
        report.warnings.push_back("dimension " + std::to_string(d) +
                                  " excluded: top words have zero mutual distance");
        break;
    }
  }
  if (!report.no_intruder.empty()) {
    report.warnings.push_back(std::to_string(report.no_intruder.size()) +
                              " dimension(s) excluded: no intruder candidate");
  }
  if (report.dimensions.empty())
    throw Error(ErrorKind::kMetricUndefined, "no dimension could be scored");
  report.overall = total / static_cast<double>(report.dimensions.size());
  return report;
}

double stability_overlap(const Matrix& a, const Matrix& b, std::size_t k) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::kShapeMismatch, "embeddings being compared differ in shape");
  if (k == 0 || k > a.rows())
    throw Error(ErrorKind::kConfigError, "k=" + std::to_string(k) + " must lie in [1, " +
                                             std::to_string(a.rows()) + "]");
  if (a.cols() == 0) throw Error(ErrorKind::kEmptyInput, "no words to compare");

  const Matrix at = a.transposed();
  const Matrix bt = b.transposed();
  auto top_dims = [k](const Matrix& word_major, std::size_t word) {
    auto order = rank_row(word_major, word);
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
  };
  double total = 0.0;
  std::vector<std::size_t> shared;
  for (std::size_t w = 0; w < a.cols(); ++w) {
    const auto ta = top_dims(at, w);
    const auto tb = top_dims(bt, w);
    shared.clear();
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(shared));
    total += static_cast<double>(shared.size()) / static_cast<double>(k);
  }
  return total / static_cast<double>(a.cols());
}

LabeledCorpus parse_labeled_corpus(std::istream& in) {
  LabeledCorpus corpus;
  std::unordered_map<std::string, std::size_t> class_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorKind::kParseFailure, "line " + std::to_string(line_no) + ": expected label<TAB>text");
    LabeledDocument doc;
    doc.line = line_no;
    std::istringstream text(line.substr(tab + 1));
    for (std::string tok; text >> tok;) doc.tokens.push_back(std::move(tok));
    if (doc.tokens.empty())
      throw Error(ErrorKind::kParseFailure, "line " + std::to_string(line_no) + ": document has no tokens");
    const std::string label = line.substr(0, tab);
    auto [it, inserted] = class_index.emplace(label, corpus.classes.size());
    if (inserted) corpus.classes.push_back(label);
    doc.label = it->second;
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) throw Error(ErrorKind::kEmptyInput, "corpus has no documents");
  return corpus;
}

LabeledCorpus read_labeled_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open '" + path + "' for reading");
  return parse_labeled_corpus(in);
}

Matrix featurize(const Matrix& embeddings, const Vocabulary& vocab, const LabeledCorpus& corpus) {
  if (vocab.size() != embeddings.cols())
    throw Error(ErrorKind::kShapeMismatch, "vocabulary size differs from embedding columns");
  const Matrix word_major = embeddings.transposed();
  const auto& k = kernels::active();
  Matrix features(corpus.documents.size(), embeddings.rows());
  std::vector<std::size_t> unknown;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    std::size_t known = 0;
    auto row = features.row(d);
    for (const auto& tok : corpus.documents[d].tokens) {
      if (auto idx = vocab.find(tok)) {
        k.axpy(1.0, word_major.row(*idx).data(), row.data(), row.size());
        ++known;
      }
    }
    if (known == 0) {
      unknown.push_back(corpus.documents[d].line);
      continue;
    }
    for (double& v : row) v /= static_cast<double>(known);
  }
  if (!unknown.empty()) {
    std::string lines;
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i)
      lines += (i ? "," : "") + std::to_string(unknown[i]);
    if (unknown.size() > 20) lines += ",...";
    throw Error(ErrorKind::kUnknownDocument, std::to_string(unknown.size()) +
                                                 " document(s) with no known token at line(s) " + lines);
  }
  return features;
}

namespace {

// Multinomial logistic regression over standardized features with a bias.
class SoftmaxClassifier {
 public:
  SoftmaxClassifier(std::size_t features, std::size_t classes)
      : weights_(classes, features + 1), mean_(features, 0.0), scale_(features, 1.0) {}

  void fit(const Matrix& x, const std::vector<std::size_t>& rows,
           const std::vector<std::size_t>& labels, int epochs, double lr) {
    const std::size_t f = x.cols();
    for (std::size_t j = 0; j < f; ++j) {
      double m = 0.0;
      for (std::size_t r : rows) m += x(r, j);
      m /= static_cast<double>(rows.size());
      double var = 0.0;
      for (std::size_t r : rows) var += (x(r, j) - m) * (x(r, j) - m);
      var /= static_cast<double>(rows.size());
      mean_[j] = m;
      scale_[j] = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    }
    Matrix z(rows.size(), f + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) standardize(x.row(rows[i]), z.row(i));

    const std::size_t classes = weights_.rows();
    const double inv = 1.0 / static_cast<double>(rows.size());
    std::vector<double> prob(classes);
    Matrix grad(classes, f + 1);
    const auto& k = kernels::active();
    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::fill(grad.values().begin(), grad.values().end(), 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        probabilities(z.row(i), prob);
        for (std::size_t c = 0; c < classes; ++c) {
          const double err = prob[c] - (labels[i] == c ? 1.0 : 0.0);
          k.axpy(err * inv, z.row(i).data(), grad.row(c).data(), f + 1);
        }
      }
      k.axpy(-lr, grad.data(), weights_.data(), grad.size());
    }
  }

  std::size_t predict(std::span<const double> features) const {
    std::vector<double> z(features.size() + 1);
    standardize(features, z);
    std::vector<double> prob(weights_.rows());
    probabilities(z, prob);
    return static_cast<std::size_t>(std::max_element(prob.begin(), prob.end()) - prob.begin());
  }

 private:
  void standardize(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean_[j]) * scale_[j];
    out[in.size()] = 1.0;
  }

  void probabilities(std::span<const double> z, std::vector<double>& prob) const {
    const auto& k = kernels::active();
    double peak = -INFINITY;
    for (std::size_t c = 0; c < weights_.rows(); ++c) {
      prob[c] = k.dot(weights_.row(c).data(), z.data(), z.size());
      peak = std::max(peak, prob[c]);
    }
    double norm = 0.0;
    for (double& p : prob) norm += (p = std::exp(p - peak));
    for (double& p : prob) p /= norm;
  }

  Matrix weights_;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace

ClassificationResult downstream_eval(const Matrix& embeddings, const Vocabulary& vocab,
                                     const LabeledCorpus& corpus, const ClassifierConfig& config) {
  if (corpus.classes.size() < 2)
    throw Error(ErrorKind::kConfigError, "corpus needs at least two classes");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
    throw Error(ErrorKind::kConfigError, "train fraction must lie in (0, 1)");
  if (config.epochs < 1 || !(config.learning_rate > 0.0))
    throw Error(ErrorKind::kConfigError, "classifier needs epochs >= 1 and learning rate > 0");
  const std::size_t n = corpus.documents.size();
  if (n < 2) throw Error(ErrorKind::kConfigError, "corpus needs at least two documents");

  const Matrix features = featurize(embeddings, vocab, corpus);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto train_size = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n)));
  train_size = std::clamp<std::size_t>(train_size, 1, n - 1);

  std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::vector<std::size_t> train_labels;
  train_labels.reserve(train_size);
  for (std::size_t r : train_rows) train_labels.push_back(corpus.documents[r].label);

  SoftmaxClassifier clf(features.cols(), corpus.classes.size());
  clf.fit(features, train_rows, train_labels, config.epochs, config.learning_rate);

  std::size_t correct = 0;
  for (std::size_t i = train_size; i < n; ++i) {
    const std::size_t r = order[i];
    if (clf.predict(features.row(r)) == corpus.documents[r].label) ++correct;
  }
  ClassificationResult result;
  result.train_size = train_size;
  result.test_size = n - train_size;
  result.accuracy = static_cast<double>(correct) / static_cast<double>(result.test_size);
  return result;
}

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  std::string out(buf);
  if (std::isfinite(value) && out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

void write_metric_report(std::ostream& out,
                         const std::vector<std::pair<std::string, double>>& metrics) {
  for (const auto& [name, value] : metrics) out << name << '=' << format_metric(value) << '\n';
}

void write_dimension_table(std::ostream& out, const DistRatioReport& report,
                           const Vocabulary& vocab) {
  auto name = [&](std::size_t w) {
    return w < vocab.size() ? vocab.word(w) : std::to_string(w);
  };
  out << "dim top_words intruder ratio\n";
  for (const auto& score : report.dimensions) {
    out << score.instance.dimension << ' ';
    for (std::size_t i = 0; i < score.instance.top_words.size(); ++i)
      out << (i ? "," : "") << name(score.instance.top_words[i]);
    out << ' ' << name(score.instance.intruder) << ' ' << format_metric(score.ratio) << '\n';
  }
}

}  // namespace swsr
