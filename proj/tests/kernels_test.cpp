#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "support/backend_guard.hpp"
#include "support/synthetic.hpp"
#include "swsr/kernels.hpp"
#include "swsr/linalg.hpp"
#include "swsr/model.hpp"

namespace swsr {
namespace {

using kernels::KernelTable;

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -2.0,
                                  double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& e : v) e = u(rng);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = kernels::avx2_table();
    if (simd_ == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable on this machine";
  }
  const KernelTable& ref_ = kernels::scalar_table();
  const KernelTable* simd_ = nullptr;
  std::mt19937_64 rng_{2024};
};

// Lengths cover empty input, every tail remainder, and long vectors.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 100, 1001};

TEST_F(KernelEquivalence, ReductionsAgreeToRounding) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, rng_);
    const auto y = random_vector(n, rng_);
    const double scale = 1e-13 * static_cast<double>(n + 1);
    EXPECT_NEAR(ref_.dot(x.data(), y.data(), n), simd_->dot(x.data(), y.data(), n), 4.0 * scale) << n;
    EXPECT_NEAR(ref_.sum(x.data(), n), simd_->sum(x.data(), n), 2.0 * scale) << n;
    EXPECT_NEAR(ref_.squared_distance(x.data(), y.data(), n),
                simd_->squared_distance(x.data(), y.data(), n), 16.0 * scale) << n;
    EXPECT_NEAR(ref_.binarization_penalty(x.data(), n), simd_->binarization_penalty(x.data(), n),
                8.0 * scale) << n;
  }
}

TEST_F(KernelEquivalence, AxpyAgreesToRounding) {
  for (std::size_t n : kLengths) {
    const auto x = random_vector(n, rng_);
    auto y_ref = random_vector(n, rng_);
    auto y_simd = y_ref;
    ref_.axpy(0.37, x.data(), y_ref.data(), n);
    simd_->axpy(0.37, x.data(), y_simd.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y_ref[i], y_simd[i], 1e-15) << n << ':' << i;
  }
}

TEST_F(KernelEquivalence, ElementwiseKernelsAreBitExact) {
  for (std::size_t n : kLengths) {
    auto x = random_vector(n, rng_, -1.5, 2.5);
    // Plant the kinks and signed zero explicitly.
    const double specials[] = {0.0, -0.0, 1.0, std::nextafter(1.0, 0.0), std::nextafter(0.0, 1.0)};
    for (std::size_t i = 0; i < n && i < 5; ++i) x[i] = specials[i];
    std::vector<double> a(n), b(n);
    ref_.capped_relu(x.data(), a.data(), n);
    simd_->capped_relu(x.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(same_bits(a[i], b[i])) << n << ':' << i;

    auto g_ref = random_vector(n, rng_);
    auto g_simd = g_ref;
    ref_.mask_by_active(x.data(), g_ref.data(), n);
    simd_->mask_by_active(x.data(), g_simd.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(same_bits(g_ref[i], g_simd[i])) << n << ':' << i;
  }
}

TEST_F(KernelEquivalence, ModelLossAndGradientMatchAcrossBackends) {
  testing::BackendGuard guard;
  const Matrix x = testing::random_normal(7, 23, rng_);
  const Matrix w = testing::random_uniform(23, 23, -0.3, 1.3, rng_);
  const HyperParams hp{1.0, 1.0, 0.1};

  ASSERT_TRUE(kernels::select(kernels::Backend::kScalar));
  const auto ref = loss_and_gradient(x, w, hp);
  ASSERT_TRUE(kernels::select(kernels::Backend::kAvx2));
  const auto simd = loss_and_gradient(x, w, hp);

  EXPECT_NEAR(ref.loss.total, simd.loss.total, 1e-12 * std::abs(ref.loss.total));
  EXPECT_NEAR(ref.loss.rl, simd.loss.rl, 1e-12 * std::abs(ref.loss.rl));
  EXPECT_NEAR(ref.loss.psl, simd.loss.psl, 1e-12);
  for (std::size_t i = 0; i < w.size(); ++i)
    EXPECT_NEAR(ref.gradient.data()[i], simd.gradient.data()[i], 1e-12) << i;
}

TEST(Kernels, ScalarCappedReluMatchesDefinition) {
  const double xs[] = {-3.0, -0.0, 0.0, 0.25, 0.999, 1.0, 7.0};
  double out[7];
  kernels::scalar_table().capped_relu(xs, out, 7);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(out[i], capped_relu(xs[i]));
}

TEST(Kernels, SelectReportsAvailability) {
  testing::BackendGuard guard;
  EXPECT_TRUE(kernels::select(kernels::Backend::kScalar));
  EXPECT_EQ(kernels::active().backend, kernels::Backend::kScalar);
  EXPECT_EQ(kernels::select(kernels::Backend::kAvx2), kernels::avx2_table() != nullptr);
}

TEST(Linalg, MatmulAgainstTripleLoop) {
  std::mt19937_64 rng(5);
  const Matrix a = testing::random_normal(4, 9, rng);
  const Matrix b = testing::random_normal(9, 6, rng);
  const Matrix c = matmul(a, b);
  const Matrix ct = matmul_tn(a.transposed(), b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double ref = 0.0;
      for (std::size_t m = 0; m < 9; ++m) ref += a(i, m) * b(m, j);
      EXPECT_NEAR(c(i, j), ref, 1e-12);
      EXPECT_NEAR(ct(i, j), ref, 1e-12);
    }
}

TEST(Linalg, ParallelModeIsBitIdenticalToStrict) {
  std::mt19937_64 rng(6);
  const Matrix a = testing::random_normal(33, 40, rng);
  const Matrix b = testing::random_normal(40, 29, rng);
  EXPECT_EQ(matmul(a, b, Determinism::kStrict), matmul(a, b, Determinism::kParallel));
  EXPECT_EQ(matmul_tn(b, b, Determinism::kStrict), matmul_tn(b, b, Determinism::kParallel));
}

}  // namespace
}  // namespace swsr
