#include "swsr/linalg.hpp"

#include "swsr/error.hpp"
#include "swsr/kernels.hpp"
#include "swsr/parallel.hpp"

namespace swsr {

Matrix matmul(const Matrix& a, const Matrix& b, Determinism mode) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::kShapeMismatch, "matmul inner dimensions differ");
  const auto& k = kernels::active();
  Matrix out(a.rows(), b.cols());
  parallel_for(a.rows(), mode, [&](std::size_t r) {
    double* dst = out.row(r).data();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(r, j);
      if (s != 0.0) k.axpy(s, b.row(j).data(), dst, b.cols());
    }
  });
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b, Determinism mode) {
  if (a.rows() != b.rows())
    throw Error(ErrorKind::kShapeMismatch, "matmul_tn row counts differ");
  const auto& k = kernels::active();
  Matrix out(a.cols(), b.cols());
  parallel_for(a.cols(), mode, [&](std::size_t j) {
    double* dst = out.row(j).data();
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const double s = a(r, j);
      if (s != 0.0) k.axpy(s, b.row(r).data(), dst, b.cols());
    }
  });
  return out;
}

}  // namespace swsr
