#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

#include "swsr/linalg.hpp"

namespace swsr {

// Runs fn(i) for i in [0, count). In kParallel mode indices are split into
// contiguous chunks, one per hardware thread; fn must only write state owned
// by index i.
template <typename Fn>
void parallel_for(std::size_t count, Determinism mode, Fn&& fn) {
  const std::size_t workers =
      mode == Determinism::kParallel
          ? std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count)
          : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace swsr
