// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include "swsr/kernels.hpp"

namespace swsr::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(diff, diff, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double diff = x[i] - y[i];
    total += diff * diff;
  }
  return total;
}

double binarization_penalty(const double* x, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, _mm256_sub_pd(one, v), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i] * (1.0 - x[i]);
  return total;
}

// max_pd returns its second operand when both inputs are zero, so -0.0 maps
// to +0.0 exactly as the scalar branch does.
void capped_relu(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_max_pd(_mm256_loadu_pd(x + i), zero);
    _mm256_storeu_pd(out + i, _mm256_min_pd(v, one));
  }
  for (; i < n; ++i) {
    const double v = x[i];
    out[i] = v <= 0.0 ? 0.0 : (v >= 1.0 ? 1.0 : v);
  }
}

void mask_by_active(const double* w, double* g, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d active = _mm256_and_pd(_mm256_cmp_pd(vw, zero, _CMP_GT_OQ),
                                         _mm256_cmp_pd(vw, one, _CMP_LT_OQ));
    _mm256_storeu_pd(g + i, _mm256_and_pd(_mm256_loadu_pd(g + i), active));
  }
  for (; i < n; ++i) {
    if (!(w[i] > 0.0 && w[i] < 1.0)) g[i] = 0.0;
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Backend::kAvx2, axpy, dot, sum, squared_distance,
                             binarization_penalty, capped_relu, mask_by_active};
  return t;
}

}  // namespace swsr::kernels::avx2
