#pragma once

#include "swsr/kernels.hpp"

namespace swsr::testing {

// Restores the previously active kernel table on scope exit.
class BackendGuard {
 public:
  BackendGuard() : saved_(kernels::active().backend) {}
  ~BackendGuard() { kernels::select(saved_); }
  BackendGuard(const BackendGuard&) = delete;
  BackendGuard& operator=(const BackendGuard&) = delete;

 private:
  kernels::Backend saved_;
};

}  // namespace swsr::testing
