// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/corpora.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "swsr/error.hpp"
#include "swsr/evalsuite.hpp"
#include "swsr/model.hpp"
#include "swsr/trainer.hpp"

namespace {

using namespace swsr;

constexpr std::uint64_t kDataSeed = 3;
constexpr std::uint64_t kTrainSeed = 3;
constexpr double kFrobeniusLambda = 0.03;
constexpr int kFrobeniusIterations = 3000;

int failures = 0;

void report(int id, const char* sub, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d%s: %s\n", ok ? "PASS" : "FAIL", id, sub, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Fixture {
  testing::SubspaceData data = testing::make_subspace_data(kDataSeed);
  TrainedModel model;
  Fixture() {
    TrainConfig cfg;
    cfg.seed = kTrainSeed;
    model = train(data.x, cfg);
  }
};

bool gradients_close(const Matrix& a, const Matrix& f, double& worst, double& worst_abs) {
  bool ok = true;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double diff = std::abs(a(i, j) - f(i, j));
      worst_abs = std::max(worst_abs, diff);
      if (diff <= 1e-8) continue;
      const double rel = diff / std::max(std::abs(a(i, j)), std::abs(f(i, j)));
      worst = std::max(worst, rel);
      if (rel >= 1e-4) ok = false;
    }
  return ok;
}

void criterion1() {
  std::mt19937_64 rng(101);
  struct Case {
    const char* name;
    HyperParams hp;
    bool zero_x;
  };
  const Case cases[] = {{"rl", {0.0, 0.0, 0.05}, false},
                        {"asl", {1.0, 0.0, 0.1}, true},
                        {"psl", {0.0, 1.0, 0.05}, true},
                        {"combined", {1.0, 1.0, 0.05}, false}};
  for (const auto& c : cases) {
    bool ok = true;
    double worst = 0.0;
    double worst_abs = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
      Matrix x = testing::random_normal(5, 8, rng);
      if (c.zero_x) x = Matrix(5, 8);
      Matrix w = testing::random_uniform(8, 8, 0.05, 0.95, rng);
      for (std::size_t i = 0; i < 8; ++i) w(i, i) = 0.0;
      ok &= gradients_close(loss_gradient(x, w, c.hp), finite_diff_gradient(x, w, c.hp, 1e-5), worst,
                            worst_abs);
    }
    report(1, (std::string(" ") + c.name).c_str(), ok,
           std::string(c.name) + " gradient vs finite differences, worst abs " + fmt("%.3g", worst_abs) +
               ", worst rel above floor " + fmt("%.3g", worst));
  }
}

void criterion2(const Fixture& f) {
  const double neural = testing::same_block_mass(f.model.coefficients, f.data.subspace);
  const Matrix frob =
      oracle::frobenius_self_representation(f.data.x.values, kFrobeniusLambda, kFrobeniusIterations);
  const double direct = testing::same_block_mass(frob, f.data.subspace);
  report(2, "", neural >= 0.9 && direct >= 0.9,
         "same-block mass neural " + fmt("%.4f", neural) + ", frobenius " + fmt("%.4f", direct));
}

void criterion3(const Fixture& f) {
  const double ratio = sparsity_ratio(f.model.coefficients);
  report(3, "", ratio >= 0.70, "sparsity ratio " + fmt("%.4f", ratio));
}

void criterion4(const Fixture& f) {
  std::mt19937_64 rng(404);
  const Matrix dense = testing::random_normal(50, 500, rng);
  IntrusionConfig cfg;
  cfg.seed = 404;
  const double random_score = dist_ratio(dense, cfg).overall;
  report(4, "a", random_score >= 0.9 && random_score <= 1.1,
         "random dense 500x50 dist ratio " + fmt("%.4f", random_score));

  IntrusionConfig same;
  same.seed = kTrainSeed;
  const double input_score = dist_ratio(f.data.x.values, same).overall;
  const double sparse_score = dist_ratio(extract_sparse_embeddings(f.model).values, same).overall;
  report(4, "b", sparse_score > 1.1 && sparse_score > input_score,
         "trained sparse dist ratio " + fmt("%.4f", sparse_score) + " vs dense input " +
             fmt("%.4f", input_score));
}

void criterion5(const Fixture& f) {
  TrainConfig cfg;
  cfg.seed = kTrainSeed;
  const auto again = train(f.data.x, cfg);
  const auto a = extract_sparse_embeddings(f.model).values;
  const double same = stability_overlap(a, extract_sparse_embeddings(again).values, 5);
  cfg.seed = kTrainSeed + 1;
  const auto other = train(f.data.x, cfg);
  const double different = stability_overlap(a, extract_sparse_embeddings(other).values, 5);
  report(5, "", same == 1.0,
         "same-seed overlap " + fmt("%.17g", same) + ", different-seed overlap " + fmt("%.4f", different));
}

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.rl) && std::isfinite(l.asl) && std::isfinite(l.psl) && std::isfinite(l.total);
}

void criterion6(const Fixture& f) {
  const auto& h = f.model.history;
  bool all_finite = finite(f.model.final_loss);
  for (const auto& l : h) all_finite &= finite(l);
  const auto& first = h.front();
  const auto& last = f.model.final_loss;
  const bool ok = all_finite && last.total < first.total && last.rl < 0.1 * first.rl;
  report(6, "", ok,
         "total " + fmt("%.4g", first.total) + " -> " + fmt("%.4g", last.total) + ", rl " +
             fmt("%.4g", first.rl) + " -> " + fmt("%.4g", last.rl) + ", rl ratio " +
             fmt("%.4f", last.rl / first.rl) + (all_finite ? "" : ", non-finite loss seen"));
}

// Values on a coarse grid produce ties; continuous values do not.
Matrix small_matrix(std::size_t rows, std::size_t cols, bool grid, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> g(0, 4);
  for (double& v : m.values()) v = grid ? 0.25 * g(rng) : u(rng);
  return m;
}

void criterion7() {
  std::mt19937_64 rng(707);
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 3; n <= 10; ++n)
    for (std::size_t k = 2; k <= 3 && k < n; ++k)
      for (std::size_t dims = 1; dims <= 10; ++dims)
        for (int trial = 0; trial < 12; ++trial) {
          const Matrix s = small_matrix(dims, n, trial % 3 == 0, rng);
          IntrusionConfig cfg;
          cfg.k = k;
          cfg.seed = rng();
          const auto bottom = static_cast<std::size_t>(std::floor(0.5 * n + 1e-9));
          const auto top = static_cast<std::size_t>(std::ceil(0.1 * n - 1e-9));
          ++instances;

          double total = 0.0;
          std::size_t scored = 0;
          for (std::size_t d = 0; d < dims; ++d) {
            const auto cands = oracle::intruder_candidates(s, d, bottom, top);
            if (intruder_candidates(s, d, cfg) != cands) ++mismatches;
            if (cands.empty()) continue;
            auto ref_rng = intruder_rng(cfg.seed, d);
            std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
            const std::size_t expected = cands[pick(ref_rng)];
            auto impl_rng = intruder_rng(cfg.seed, d);
            if (select_intruder(s, d, cfg, impl_rng) != expected) ++mismatches;
            const double r = oracle::dimension_ratio(s, oracle::top_words(s, d, k), expected);
            if (!std::isfinite(r)) continue;
            total += r;
            ++scored;
          }
          try {
            const auto rep = dist_ratio(s, cfg);
            if (scored == 0 || rep.dimensions.size() != scored ||
                std::abs(rep.overall - total / static_cast<double>(scored)) > 1e-12)
              ++mismatches;
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kMetricUndefined || scored != 0) ++mismatches;
          }

          if (dims >= k) {
            const Matrix t = small_matrix(dims, n, trial % 2 == 0, rng);
            if (std::abs(stability_overlap(s, t, k) - oracle::stability_overlap(s, t, k)) > 1e-15)
              ++mismatches;
          }
        }
  report(7, "", mismatches == 0,
         std::to_string(instances) + " small instances vs brute force, " + std::to_string(mismatches) +
             " mismatches");
}

void criterion8() {
  const auto task = testing::make_separable_task(808);
  ClassifierConfig cfg;
  cfg.seed = 808;
  const double separable = downstream_eval(task.embeddings, task.vocab, task.corpus, cfg).accuracy;
  const auto shuffled = testing::shuffle_labels(testing::make_separable_task(809, 2000), 809);
  const double chance = downstream_eval(shuffled.embeddings, shuffled.vocab, shuffled.corpus, cfg).accuracy;
  report(8, "", separable == 1.0 && chance >= 0.35 && chance <= 0.65,
         "separable accuracy " + fmt("%.4f", separable) + ", shuffled " + fmt("%.4f", chance));
}

void criterion9() {
  std::mt19937_64 rng(909);
  const Matrix values = testing::random_normal(50, 1000, rng);
  Vocabulary vocab;
  for (int i = 0; i < 1000; ++i) vocab.add("tok" + std::to_string(i));
  std::stringstream first;
  write_embeddings(vocab, values, first);
  const auto parsed = parse_dense_embeddings(first);
  std::stringstream second;
  write_embeddings(parsed.vocab, parsed.embeddings.values, second);
  const auto again = parse_dense_embeddings(second);
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    worst = std::max(worst, std::abs(again.embeddings.values.values()[i] - values.values()[i]));
  const bool ok = again.vocab == vocab && again.embeddings.values.rows() == 50 && worst <= 1e-6;
  report(9, "", ok, "1000-word round trip, worst abs error " + fmt("%.3g", worst));
}

void criterion10(const Fixture& f) {
  std::vector<TrainedModel> runs;
  runs.push_back(f.model);
  for (std::uint64_t seed : {11u, 12u}) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 300;
    cfg.learning_rate = 0.01;
    runs.push_back(train(f.data.x, cfg));
  }
  bool ok = true;
  for (const auto& run : runs) {
    const auto vals = run.coefficients.values();
    ok &= std::all_of(vals.begin(), vals.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    ok &= std::any_of(vals.begin(), vals.end(), [](double v) { return v == 0.0; });
  }
  std::mt19937_64 rng(1010);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 50; ++t) {
    Matrix b(12, 12);
    for (double& v : b.values()) v = coin(rng) ? 1.0 : 0.0;
    ok &= partial_sparsity_loss(b) == 0.0;
  }
  report(10, "", ok, "coefficients within [0,1] with exact zeros; binary matrices give zero PSL");
}

}  // namespace

int main() {
  try {
    criterion1();
    const Fixture fixture;
    criterion2(fixture);
    criterion3(fixture);
    criterion4(fixture);
    criterion5(fixture);
    criterion6(fixture);
    criterion7();
    criterion8();
    criterion9();
    criterion10(fixture);
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criterion check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
