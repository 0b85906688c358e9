#include "swsr/model.hpp"

#include <cmath>
#include <string>

#include "swsr/error.hpp"
#include "swsr/kernels.hpp"

namespace swsr {

void HyperParams::validate() const {
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1))
    throw Error(ErrorKind::kConfigError, "lambda1 must be finite and >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2))
    throw Error(ErrorKind::kConfigError, "lambda2 must be finite and >= 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::kConfigError, "rho must lie in [0, 1]");
}

Matrix activate(const Matrix& w) {
  if (!w.is_square()) throw Error(ErrorKind::kShapeMismatch, "parameter matrix must be square");
  Matrix c(w.rows(), w.cols());
  kernels::active().capped_relu(w.data(), c.data(), w.size());
  for (std::size_t i = 0; i < c.rows(); ++i) c(i, i) = 0.0;
  return c;
}

Matrix forward(const Matrix& x, const Matrix& c, Determinism mode) {
  if (!c.is_square() || c.rows() != x.cols()) {
    throw Error(ErrorKind::kShapeMismatch,
                "coefficients are " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                    " but input has " + std::to_string(x.cols()) + " words");
  }
  return matmul(x, c, mode);
}

double reconstruction_loss(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
    throw Error(ErrorKind::kShapeMismatch, "reconstruction shape differs from input");
  if (x.cols() == 0) return 0.0;
  return kernels::active().squared_distance(x.data(), x_hat.data(), x.size()) /
         static_cast<double>(x.cols());
}

double average_sparsity_loss(const Matrix& c, double rho) {
  const auto& k = kernels::active();
  const double n = static_cast<double>(c.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const double excess = k.sum(c.row(i).data(), c.cols()) / n - rho;
    if (excess > 0.0) loss += excess;
  }
  return loss;
}

double partial_sparsity_loss(const Matrix& c) {
  if (c.rows() == 0) return 0.0;
  return kernels::active().binarization_penalty(c.data(), c.size()) / static_cast<double>(c.rows());
}

namespace {

void check_shapes(const Matrix& x, const Matrix& w) {
  if (!w.is_square() || w.rows() != x.cols()) {
    throw Error(ErrorKind::kShapeMismatch,
                "parameters are " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                    " but input has " + std::to_string(x.cols()) + " words");
  }
}

LossBreakdown combine(double rl, double asl, double psl, const HyperParams& hp) {
  return {rl, asl, psl, rl + hp.lambda1 * asl + hp.lambda2 * psl};
}

}  // namespace

LossBreakdown total_loss(const Matrix& x, const Matrix& w, const HyperParams& hp,
                         Determinism mode) {
  check_shapes(x, w);
  const Matrix c = activate(w);
  const Matrix x_hat = forward(x, c, mode);
  return combine(reconstruction_loss(x, x_hat), average_sparsity_loss(c, hp.rho),
                 partial_sparsity_loss(c), hp);
}

LossAndGradient loss_and_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp,
                                  Determinism mode) {
  check_shapes(x, w);
  const auto& k = kernels::active();
  const std::size_t n = w.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  const Matrix c = activate(w);
  Matrix residual = forward(x, c, mode);
  const LossBreakdown loss = combine(reconstruction_loss(x, residual),
                                     average_sparsity_loss(c, hp.rho), partial_sparsity_loss(c), hp);

  // residual = X C - X
  k.axpy(-1.0, x.data(), residual.data(), x.size());
  Matrix grad = matmul_tn(x, residual, mode);
  const double rl_scale = 2.0 * inv_n;
  for (double& g : grad.values()) g *= rl_scale;

  for (std::size_t i = 0; i < n; ++i) {
    auto c_row = c.row(i);
    auto g_row = grad.row(i);
    const bool hinge_active = k.sum(c_row.data(), n) * inv_n - hp.rho > 0.0;
    const double asl_term = hinge_active ? hp.lambda1 * inv_n : 0.0;
    for (std::size_t j = 0; j < n; ++j)
      g_row[j] += asl_term + hp.lambda2 * (1.0 - 2.0 * c_row[j]) * inv_n;
  }

  k.mask_by_active(w.data(), grad.data(), grad.size());
  for (std::size_t i = 0; i < n; ++i) grad(i, i) = 0.0;
  return {loss, std::move(grad)};
}

Matrix loss_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp, Determinism mode) {
  return loss_and_gradient(x, w, hp, mode).gradient;
}

Matrix finite_diff_gradient(const Matrix& x, const Matrix& w, const HyperParams& hp, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::kConfigError, "finite difference step must be > 0");
  check_shapes(x, w);
  Matrix probe = w;
  Matrix grad(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double original = probe(i, j);
      probe(i, j) = original + step;
      const double up = total_loss(x, probe, hp).total;
      probe(i, j) = original - step;
      const double down = total_loss(x, probe, hp).total;
      probe(i, j) = original;
      grad(i, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace swsr
