#include "swsr/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "swsr/error.hpp"

namespace swsr {

void TrainConfig::validate() const {
  hyper.validate();
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorKind::kConfigError, "learning rate must be finite and >= 0");
  if (epochs < 1) throw Error(ErrorKind::kConfigError, "epochs must be >= 1");
  if (!(init_low >= 0.0 && init_low < init_high) || !std::isfinite(init_high))
    throw Error(ErrorKind::kConfigError, "init range must satisfy 0 <= low < high");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw Error(ErrorKind::kConfigError, "adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kConfigError, "adam epsilon must be > 0");
}

Matrix initialize_params(std::size_t vocab_size, const TrainConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(config.init_low, config.init_high);
  Matrix w(vocab_size, vocab_size);
  for (double& v : w.values()) v = dist(rng);
  for (std::size_t i = 0; i < vocab_size; ++i) w(i, i) = 0.0;
  return w;
}

namespace {

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.rl) && std::isfinite(l.asl) && std::isfinite(l.psl) &&
         std::isfinite(l.total);
}

bool finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) return false;
  return true;
}

[[noreturn]] void diverged(int epoch, const char* what) {
  throw Error(ErrorKind::kDivergenceDetected,
              std::string("non-finite ") + what + " at epoch " + std::to_string(epoch));
}

class AdamState {
 public:
  AdamState(std::size_t size, const TrainConfig& cfg)
      : m_(size, 0.0), v_(size, 0.0), cfg_(cfg) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double b1 = cfg_.beta1;
    const double b2 = cfg_.beta2;
    const double m_correction = 1.0 - std::pow(b1, t_);
    const double v_correction = 1.0 - std::pow(b2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
      v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
      const double m_hat = m_[i] / m_correction;
      const double v_hat = v_[i] / v_correction;
      params[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  const TrainConfig& cfg_;
  int t_ = 0;
};

}  // namespace

TrainedModel train(const DenseEmbeddings& x, const TrainConfig& config) {
  config.validate();
  if (!finite(x.values)) throw Error(ErrorKind::kConfigError, "input embeddings contain non-finite values");
  const std::size_t n = x.vocab_size();

  TrainedModel model;
  model.config = config;
  model.params = initialize_params(n, config);
  model.history.reserve(static_cast<std::size_t>(config.epochs));

  AdamState adam(model.params.size(), config);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto [loss, grad] = loss_and_gradient(x.values, model.params, config.hyper, config.determinism);
    if (!finite(loss)) diverged(epoch, "loss");
    if (!finite(grad)) diverged(epoch, "gradient");
    model.history.push_back(loss);

    if (config.optimizer == Optimizer::kAdam) {
      adam.step(model.params.values(), grad.values());
    } else {
      auto w = model.params.values();
      auto g = grad.values();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * g[i];
    }
    if (!finite(model.params)) diverged(epoch, "parameter");
  }

  model.final_loss = total_loss(x.values, model.params, config.hyper, config.determinism);
  if (!finite(model.final_loss)) diverged(config.epochs, "loss");
  model.coefficients = activate(model.params);
  return model;
}

SparseEmbeddings extract_sparse_embeddings(const TrainedModel& model) {
  return SparseEmbeddings{model.coefficients};
}

std::string_view optimizer_name(Optimizer opt) { return opt == Optimizer::kAdam ? "adam" : "sgd"; }

std::optional<Optimizer> parse_optimizer(std::string_view name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd") return Optimizer::kSgd;
  return std::nullopt;
}

std::string_view determinism_name(Determinism mode) {
  return mode == Determinism::kStrict ? "strict" : "parallel";
}

std::optional<Determinism> parse_determinism(std::string_view name) {
  if (name == "strict") return Determinism::kStrict;
  if (name == "parallel") return Determinism::kParallel;
  return std::nullopt;
}

namespace {

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> describe(const TrainConfig& c) {
  return {
      {"seed", std::to_string(c.seed)},
      {"epochs", std::to_string(c.epochs)},
      {"lambda1", exact(c.hyper.lambda1)},
      {"lambda2", exact(c.hyper.lambda2)},
      {"rho", exact(c.hyper.rho)},
      {"lr", exact(c.learning_rate)},
      {"optimizer", std::string(optimizer_name(c.optimizer))},
      {"beta1", exact(c.beta1)},
      {"beta2", exact(c.beta2)},
      {"epsilon", exact(c.epsilon)},
      {"init_low", exact(c.init_low)},
      {"init_high", exact(c.init_high)},
      {"determinism", std::string(determinism_name(c.determinism))},
  };
}

void write_loss_history(std::ostream& out, const std::vector<LossBreakdown>& history) {
  out << "epoch,rl,asl,psl,total\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    const auto& l = history[e];
    out << e << ',' << exact(l.rl) << ',' << exact(l.asl) << ',' << exact(l.psl) << ','
        << exact(l.total) << '\n';
  }
  if (!out) throw Error(ErrorKind::kIoFailure, "writing loss history failed");
}

void write_checkpoint(std::ostream& out, const Vocabulary& vocab, const TrainedModel& model) {
  const Matrix& w = model.params;
  if (vocab.size() != w.rows())
    throw Error(ErrorKind::kShapeMismatch, "vocabulary size differs from parameter matrix");
  out << "# epoch=" << model.history.size();
  for (const auto& [key, value] : describe(model.config)) out << ' ' << key << '=' << value;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    line = vocab.word(i);
    for (double v : w.row(i)) {
      line += ' ';
      line += exact(v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorKind::kIoFailure, "writing checkpoint failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint ckpt;
  std::string header;
  if (!std::getline(in, header) || header.rfind('#', 0) != 0)
    throw Error(ErrorKind::kParseFailure, "checkpoint must start with a '#' header line");
  std::istringstream fields(header.substr(1));
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::kParseFailure, "bad checkpoint header field '" + field + "'");
    ckpt.header[field.substr(0, eq)] = field.substr(eq + 1);
  }
  // Each line is `word w_i0 ... w_in`, which is the dense embedding layout
  // with rows in place of columns.
  auto parsed = parse_dense_embeddings(in);
  if (parsed.embeddings.dim() != parsed.vocab.size())
    throw Error(ErrorKind::kShapeMismatch, "checkpoint parameter matrix is not square");
  ckpt.vocab = std::move(parsed.vocab);
  ckpt.params = parsed.embeddings.values.transposed();
  return ckpt;
}

}  // namespace swsr
