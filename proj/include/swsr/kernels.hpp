#pragma once

// Inner-loop kernels. Every kernel has a portable scalar reference
// implementation; an AVX2/FMA variant is compiled on x86-64 and picked at
// runtime when the CPU supports it. Element-wise kernels (capped_relu,
// mask_by_active) are bit-identical across backends; reductions and axpy
// agree to rounding only, since lane order and FMA contraction differ.

#include <cstddef>
#include <string_view>

namespace swsr::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  Backend backend;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // sum_i (x[i] - y[i])^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  // sum_i x[i] * (1 - x[i])
  double (*binarization_penalty)(const double* x, std::size_t n);
  // out[i] = min(max(x[i], 0), 1)
  void (*capped_relu)(const double* x, double* out, std::size_t n);
  // g[i] = (0 < w[i] < 1) ? g[i] : 0
  void (*mask_by_active)(const double* w, double* g, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Active table. Chosen on first use: AVX2 when available unless the
// SWSR_KERNELS environment variable is "scalar".
const KernelTable& active();

// Overrides the active backend; returns false when it is unavailable.
bool select(Backend backend);

std::string_view backend_name(Backend backend);

}  // namespace swsr::kernels
