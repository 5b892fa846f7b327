// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/optim.hpp"

#include <cmath>
#include <numbers>

namespace defr {

void adam_step(Matrix& w, const Matrix& grad, AdamState& state, double lr) {
  if (grad.rows() != w.rows() || grad.cols() != w.cols() || state.m.rows() != w.rows() ||
      state.m.cols() != w.cols() || state.v.rows() != w.rows() || state.v.cols() != w.cols()) {
    throw DimensionError("adam: parameter, gradient and state shapes differ");
  }
  if (!(lr > 0.0)) throw ConfigError("adam: learning rate must be positive");

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  auto wd = w.data();
  auto gd = grad.data();
  auto md = state.m.data();
  auto vd = state.v.data();
  for (std::size_t i = 0; i < wd.size(); ++i) {
    md[i] = state.beta1 * md[i] + (1.0 - state.beta1) * gd[i];
    vd[i] = state.beta2 * vd[i] + (1.0 - state.beta2) * gd[i] * gd[i];
    double m_hat = md[i] / c1;
    double v_hat = vd[i] / c2;
    wd[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

double lr_at(const Schedule& schedule, std::uint64_t global_step) {
  if (schedule.min_lr > schedule.base_lr) throw ConfigError("min_lr exceeds base_lr");
  const std::uint64_t period = schedule.period_steps();
  if (period == 0) throw ConfigError("schedule period must be positive");
  double u = static_cast<double>(global_step % period) / static_cast<double>(period);
  return schedule.min_lr +
         0.5 * (schedule.base_lr - schedule.min_lr) * (1.0 + std::cos(std::numbers::pi * u));
}

}  // namespace defr
