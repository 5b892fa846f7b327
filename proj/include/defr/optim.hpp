// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "defr/matrix.hpp"

namespace defr {

/// Adam moments for one parameter matrix. No weight decay.
struct AdamState {
  Matrix m;
  Matrix v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols) : m(rows, cols), v(rows, cols) {}
};

/// One bias-corrected Adam update of `w` in place.
void adam_step(Matrix& w, const Matrix& grad, AdamState& state, double lr);

/// Cosine annealing with warm restarts of fixed period.
struct Schedule {
  double base_lr = 1e-4;
  double min_lr = 0.0;
  std::size_t restart_period = 5;  // epochs
  std::size_t steps_per_epoch = 1;

  std::size_t period_steps() const noexcept { return restart_period * steps_per_epoch; }
};

/// lr = min + (base - min) * (1 + cos(pi * u)) / 2 with
/// u = (step mod period) / period.
double lr_at(const Schedule& schedule, std::uint64_t global_step);

}  // namespace defr
