#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swsr/embedding_io.hpp"
#include "swsr/linalg.hpp"
#include "swsr/model.hpp"

namespace swsr {

enum class Optimizer { kAdam, kSgd };

struct TrainConfig {
  HyperParams hyper;
  double learning_rate = 1e-3;
  int epochs = 2000;
  Optimizer optimizer = Optimizer::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  double init_low = 0.01;
  double init_high = 0.1;
  Determinism determinism = Determinism::kStrict;

  // Throws kConfigError. A zero learning rate is accepted (no-op steps).
  void validate() const;
};

struct TrainedModel {
  Matrix params;        // W
  Matrix coefficients;  // activate(W)
  std::vector<LossBreakdown> history;  // loss at the start of each epoch
  LossBreakdown final_loss;            // loss after the last update
  TrainConfig config;
};

// Seeded W: i.i.d. uniform in [init_low, init_high) off the diagonal, zero on it.
Matrix initialize_params(std::size_t vocab_size, const TrainConfig& config);

// Full-batch first-order training. Throws kDivergenceDetected on any
// non-finite loss or gradient, kConfigError on an invalid config.
TrainedModel train(const DenseEmbeddings& x, const TrainConfig& config);

SparseEmbeddings extract_sparse_embeddings(const TrainedModel& model);

std::string_view optimizer_name(Optimizer opt);
std::optional<Optimizer> parse_optimizer(std::string_view name);
std::string_view determinism_name(Determinism mode);
std::optional<Determinism> parse_determinism(std::string_view name);

// `key=value` pairs echoing the configuration, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& config);

// CSV with header `epoch,rl,asl,psl,total`; one row per recorded epoch.
void write_loss_history(std::ostream& out, const std::vector<LossBreakdown>& history);

// Header line `# key=value ...`, then one line per row of W prefixed by the
// row's basis word. Values are written with round-trip precision.
void write_checkpoint(std::ostream& out, const Vocabulary& vocab, const TrainedModel& model);

struct Checkpoint {
  std::map<std::string, std::string> header;
  Vocabulary vocab;
  Matrix params;
};
Checkpoint read_checkpoint(std::istream& in);

}  // namespace swsr
