#pragma once

// Self-representation model: reconstructed embeddings are X * f(W) where f
// is the capped ReLU with the diagonal masked to zero.

#include "swsr/embedding_io.hpp"
#include "swsr/linalg.hpp"
#include "swsr/matrix.hpp"

namespace swsr {

struct HyperParams {
  double lambda1 = 1.0;  // average sparsity weight
  double lambda2 = 0.1;  // partial sparsity weight
  double rho = 0.05;     // target mean activation per dimension

  // Throws kConfigError.
  void validate() const;
};

struct LossBreakdown {
  double rl = 0.0;
  double asl = 0.0;
  double psl = 0.0;
  double total = 0.0;
};

// Clamp to [0, 1]; exact 0 for x <= 0 and exact 1 for x >= 1.
constexpr double capped_relu(double x) noexcept { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); }

// Slope 1 strictly inside (0, 1). Both kinks take slope 0.
constexpr double capped_relu_subgrad(double x) noexcept { return (x > 0.0 && x < 1.0) ? 1.0 : 0.0; }

// C = capped_relu(W) with diag(C) = 0. W must be square.
Matrix activate(const Matrix& w);

// X * C; throws kShapeMismatch.
Matrix forward(const Matrix& x, const Matrix& c, Determinism mode = Determinism::kStrict);

// (1/|V|) sum over word columns of the squared reconstruction error.
double reconstruction_loss(const Matrix& x, const Matrix& x_hat);

// sum over rows of max(mean(row) - rho, 0).
double average_sparsity_loss(const Matrix& c, double rho);

// (1/n) sum_ij c_ij (1 - c_ij).
double partial_sparsity_loss(const Matrix& c);

LossBreakdown total_loss(const Matrix& x, const Matrix& w, const HyperParams& hp,
                         Determinism mode = Determinism::kStrict);

// dL/dW for total_loss, diagonal forced to zero.
Matrix loss_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp,
                     Determinism mode = Determinism::kStrict);

// Loss and gradient from one forward pass; used by the trainer.
struct LossAndGradient {
  LossBreakdown loss;
  Matrix gradient;
};
LossAndGradient loss_and_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp,
                                  Determinism mode = Determinism::kStrict);

// Central differences of total_loss().total, one entry at a time.
Matrix finite_diff_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp, double step);

}  // namespace swsr
