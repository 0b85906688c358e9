#pragma once

#include "swsr/matrix.hpp"

namespace swsr {

// kStrict runs on the calling thread. kParallel splits output rows across
// hardware threads; each output row is still accumulated in a fixed order.
enum class Determinism { kStrict, kParallel };

// A * B
Matrix matmul(const Matrix& a, const Matrix& b, Determinism mode = Determinism::kStrict);
// transpose(A) * B
Matrix matmul_tn(const Matrix& a, const Matrix& b, Determinism mode = Determinism::kStrict);

}  // namespace swsr
