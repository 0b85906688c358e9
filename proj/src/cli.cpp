#include "swsr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "swsr/embedding_io.hpp"
#include "swsr/error.hpp"
#include "swsr/evalsuite.hpp"
#include "swsr/kernels.hpp"
#include "swsr/trainer.hpp"

namespace swsr::cli {
namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

struct TrainArgs {
  std::string input;
  std::string input_format = "dense";
  bool normalize = false;
  std::uint64_t seed = 0;
  int epochs = 2000;
  double lr = 1e-3;
  double lambda1 = 1.0;
  double lambda2 = 0.1;
  double rho = 0.05;
  std::string optimizer = "adam";
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double init_low = 0.01;
  double init_high = 0.1;
  std::string determinism = "strict";
  std::string out_sparse;
  std::string format = "dense";
  std::string out_checkpoint;
  std::string out_history;
};

struct TransformArgs {
  std::string checkpoint;
  std::string out_sparse;
  std::string format = "dense";
};

struct IntrusionArgs {
  std::string input;
  std::string input_format = "dense";
  std::uint64_t seed = 0;
  std::size_t k = 5;
  double bottom_fraction = 0.5;
  double top_fraction = 0.1;
  bool table = false;
  std::string determinism = "strict";
};

struct StabilityArgs {
  std::string a;
  std::string b;
  std::string input_format = "dense";
  std::size_t k = 5;
};

struct ClassifyArgs {
  std::string embeddings;
  std::string corpus;
  std::string input_format = "dense";
  double split = 0.8;
  std::uint64_t seed = 0;
  int epochs = 300;
  double lr = 0.5;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void require_readable(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw Error(ErrorKind::kIoFailure, "cannot read input file '" + path + "'");
}

void echo(std::ostream& err, const std::string& command, const Settings& settings) {
  err << "# " << command;
  for (const auto& [key, value] : settings) err << ' ' << key << '=' << value;
  err << '\n';
}

ParsedEmbeddings load(const std::string& path, const std::string& format) {
  require_readable(path);
  return format == "triplet" ? read_triplet_embeddings(path) : read_dense_embeddings(path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot open '" + path + "' for writing");
  return out;
}

int do_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  config.hyper = {a.lambda1, a.lambda2, a.rho};
  config.learning_rate = a.lr;
  config.epochs = a.epochs;
  config.optimizer = *parse_optimizer(a.optimizer);
  config.beta1 = a.beta1;
  config.beta2 = a.beta2;
  config.epsilon = a.epsilon;
  config.seed = a.seed;
  config.init_low = a.init_low;
  config.init_high = a.init_high;
  config.determinism = *parse_determinism(a.determinism);

  Settings settings = {{"input", a.input}, {"input_format", a.input_format},
                       {"normalize", a.normalize ? "true" : "false"}};
  for (auto& kv : describe(config)) settings.push_back(std::move(kv));
  settings.insert(settings.end(), {{"out_sparse", a.out_sparse},
                                   {"format", a.format},
                                   {"out_checkpoint", a.out_checkpoint},
                                   {"out_history", a.out_history},
                                   {"kernels", std::string(kernels::backend_name(kernels::active().backend))}});
  echo(err, "train", settings);
  config.validate();

  auto parsed = load(a.input, a.input_format);
  if (a.normalize) parsed.embeddings = l2_normalize(parsed.embeddings, parsed.vocab);

  const TrainedModel model = train(parsed.embeddings, config);
  const SparseEmbeddings sparse = extract_sparse_embeddings(model);

  if (!a.out_sparse.empty())
    write_sparse_embeddings(parsed.vocab, sparse, a.out_sparse, *parse_sparse_format(a.format));
  if (!a.out_checkpoint.empty()) {
    auto f = open_output(a.out_checkpoint);
    write_checkpoint(f, parsed.vocab, model);
  }
  if (!a.out_history.empty()) {
    auto f = open_output(a.out_history);
    write_loss_history(f, model.history);
  }

  const auto& first = model.history.front();
  write_metric_report(out, {{"initial_total", first.total},
                            {"final_rl", model.final_loss.rl},
                            {"final_asl", model.final_loss.asl},
                            {"final_psl", model.final_loss.psl},
                            {"final_total", model.final_loss.total},
                            {"sparsity_ratio", sparsity_ratio(sparse.values)}});
  return kOk;
}

int do_transform(const TransformArgs& a, std::ostream& /*out*/, std::ostream& err) {
  echo(err, "transform", {{"checkpoint", a.checkpoint}, {"out_sparse", a.out_sparse}, {"format", a.format}});
  require_readable(a.checkpoint);
  std::ifstream in(a.checkpoint);
  const Checkpoint ckpt = read_checkpoint(in);
  const SparseEmbeddings sparse{activate(ckpt.params)};
  write_sparse_embeddings(ckpt.vocab, sparse, a.out_sparse, *parse_sparse_format(a.format));
  return kOk;
}

int do_intrusion(const IntrusionArgs& a, std::ostream& out, std::ostream& err) {
  echo(err, "eval-intrusion",
       {{"input", a.input}, {"input_format", a.input_format}, {"seed", std::to_string(a.seed)},
        {"k", std::to_string(a.k)}, {"bottom_fraction", num(a.bottom_fraction)},
        {"top_fraction", num(a.top_fraction)}, {"table", a.table ? "true" : "false"},
        {"determinism", a.determinism}});
  const auto parsed = load(a.input, a.input_format);
  IntrusionConfig config;
  config.k = a.k;
  config.bottom_fraction = a.bottom_fraction;
  config.top_fraction = a.top_fraction;
  config.seed = a.seed;
  const Matrix& s = parsed.embeddings.values;
  const auto report = dist_ratio(s, config, *parse_determinism(a.determinism));
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  write_metric_report(
      out, {{"dist_ratio", report.overall},
            {"dimensions_scored", static_cast<double>(report.dimensions.size())},
            {"dimensions_skipped", static_cast<double>(report.no_intruder.size() + report.zero_intra.size())},
            {"sparsity_ratio", sparsity_ratio(s)}});
  if (a.table) write_dimension_table(out, report, parsed.vocab);
  return kOk;
}

int do_stability(const StabilityArgs& a, std::ostream& out, std::ostream& err) {
  echo(err, "eval-stability",
       {{"a", a.a}, {"b", a.b}, {"input_format", a.input_format}, {"k", std::to_string(a.k)}});
  const auto pa = load(a.a, a.input_format);
  const auto pb = load(a.b, a.input_format);
  if (!(pa.vocab == pb.vocab))
    throw Error(ErrorKind::kShapeMismatch, "the two files have different vocabularies");
  write_metric_report(out, {{"stability_overlap", stability_overlap(pa.embeddings.values,
                                                                    pb.embeddings.values, a.k)}});
  return kOk;
}

int do_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  echo(err, "eval-classify",
       {{"embeddings", a.embeddings}, {"corpus", a.corpus}, {"input_format", a.input_format},
        {"split", num(a.split)}, {"seed", std::to_string(a.seed)},
        {"epochs", std::to_string(a.epochs)}, {"lr", num(a.lr)}});
  const auto parsed = load(a.embeddings, a.input_format);
  require_readable(a.corpus);
  const auto corpus = read_labeled_corpus(a.corpus);
  ClassifierConfig config{a.split, a.seed, a.epochs, a.lr};
  const auto result = downstream_eval(parsed.embeddings.values, parsed.vocab, corpus, config);
  write_metric_report(out, {{"accuracy", result.accuracy},
                            {"train_size", static_cast<double>(result.train_size)},
                            {"test_size", static_cast<double>(result.test_size)}});
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfigError:
      return kUsage;
    case ErrorKind::kDivergenceDetected:
      return kDivergence;
    default:
      return kDataError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse self-representation word embeddings: train, transform, evaluate", "swsr"};
  app.require_subcommand(1);
  std::string backend = "auto";
  app.add_option("--kernels", backend, "Kernel backend: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  const auto formats = CLI::IsMember({"dense", "triplet"});
  const auto modes = CLI::IsMember({"strict", "parallel"});

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train on dense embeddings and write sparse codes");
  train_cmd->add_option("--input", ta.input, "Dense embedding file")->required();
  train_cmd->add_option("--input-format", ta.input_format)->check(formats)->capture_default_str();
  train_cmd->add_flag("--normalize", ta.normalize, "Scale every input vector to unit length");
  train_cmd->add_option("--seed", ta.seed, "Initialization seed")->required();
  train_cmd->add_option("--epochs", ta.epochs)->capture_default_str();
  train_cmd->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--lambda1", ta.lambda1, "Average sparsity weight")->capture_default_str();
  train_cmd->add_option("--lambda2", ta.lambda2, "Partial sparsity weight")->capture_default_str();
  train_cmd->add_option("--rho", ta.rho, "Target mean activation")->capture_default_str();
  train_cmd->add_option("--optimizer", ta.optimizer)
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  train_cmd->add_option("--beta1", ta.beta1)->capture_default_str();
  train_cmd->add_option("--beta2", ta.beta2)->capture_default_str();
  train_cmd->add_option("--epsilon", ta.epsilon)->capture_default_str();
  train_cmd->add_option("--init-low", ta.init_low)->capture_default_str();
  train_cmd->add_option("--init-high", ta.init_high)->capture_default_str();
  train_cmd->add_option("--determinism", ta.determinism)->check(modes)->capture_default_str();
  train_cmd->add_option("--out-sparse", ta.out_sparse, "Sparse embedding output path");
  train_cmd->add_option("--format", ta.format, "Sparse output format")->check(formats)->capture_default_str();
  train_cmd->add_option("--out-checkpoint", ta.out_checkpoint, "Checkpoint output path");
  train_cmd->add_option("--out-history", ta.out_history, "Loss history CSV output path");

  TransformArgs tr;
  auto* transform_cmd = app.add_subcommand("transform", "Write sparse codes from a checkpoint");
  transform_cmd->add_option("--checkpoint", tr.checkpoint)->required();
  transform_cmd->add_option("--out-sparse", tr.out_sparse)->required();
  transform_cmd->add_option("--format", tr.format)->check(formats)->capture_default_str();

  IntrusionArgs ia;
  auto* intrusion_cmd = app.add_subcommand("eval-intrusion", "Word intrusion DistRatio");
  intrusion_cmd->add_option("--input", ia.input)->required();
  intrusion_cmd->add_option("--input-format", ia.input_format)->check(formats)->capture_default_str();
  intrusion_cmd->add_option("--seed", ia.seed, "Intruder sampling seed")->required();
  intrusion_cmd->add_option("--k", ia.k, "Top words per dimension")->capture_default_str();
  intrusion_cmd->add_option("--bottom-fraction", ia.bottom_fraction)->capture_default_str();
  intrusion_cmd->add_option("--top-fraction", ia.top_fraction)->capture_default_str();
  intrusion_cmd->add_flag("--table", ia.table, "Print the per-dimension table");
  intrusion_cmd->add_option("--determinism", ia.determinism)->check(modes)->capture_default_str();

  StabilityArgs sa;
  auto* stability_cmd = app.add_subcommand("eval-stability", "Top-k dimension overlap of two runs");
  stability_cmd->add_option("--a", sa.a)->required();
  stability_cmd->add_option("--b", sa.b)->required();
  stability_cmd->add_option("--input-format", sa.input_format)->check(formats)->capture_default_str();
  stability_cmd->add_option("--k", sa.k)->capture_default_str();

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("eval-classify", "Downstream classification accuracy");
  classify_cmd->add_option("--embeddings", ca.embeddings)->required();
  classify_cmd->add_option("--corpus", ca.corpus)->required();
  classify_cmd->add_option("--input-format", ca.input_format)->check(formats)->capture_default_str();
  classify_cmd->add_option("--split", ca.split, "Training fraction")->capture_default_str();
  classify_cmd->add_option("--seed", ca.seed)->capture_default_str();
  classify_cmd->add_option("--epochs", ca.epochs)->capture_default_str();
  classify_cmd->add_option("--lr", ca.lr)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  if (backend != "auto") {
    const auto wanted = backend == "scalar" ? kernels::Backend::kScalar : kernels::Backend::kAvx2;
    if (!kernels::select(wanted)) {
      err << "usage error: --kernels " << backend << " is not available on this machine\n";
      return kUsage;
    }
  }

  try {
    if (*train_cmd) return do_train(ta, out, err);
    if (*transform_cmd) return do_transform(tr, out, err);
    if (*intrusion_cmd) return do_intrusion(ia, out, err);
    if (*stability_cmd) return do_stability(sa, out, err);
    if (*classify_cmd) return do_classify(ca, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace swsr::cli
