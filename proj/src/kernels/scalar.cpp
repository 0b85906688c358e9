#include "swsr/kernels.hpp"

namespace swsr::kernels {
namespace {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = x[i] - y[i];
    acc += diff * diff;
  }
  return acc;
}

double binarization_penalty(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * (1.0 - x[i]);
  return acc;
}

void capped_relu(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    out[i] = v <= 0.0 ? 0.0 : (v >= 1.0 ? 1.0 : v);
  }
}

void mask_by_active(const double* w, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0.0 && w[i] < 1.0)) g[i] = 0.0;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Backend::kScalar, axpy, dot, sum, squared_distance,
                                 binarization_penalty, capped_relu, mask_by_active};
  return table;
}

}  // namespace swsr::kernels
