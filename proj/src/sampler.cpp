// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace defr {

SplitPlan split(std::size_t n, double val_fraction, std::uint64_t seed) {
  if (n < 2) throw ConfigError("split needs at least 2 rows");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val fraction must lie in (0, 1)");
  }
  auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
  if (n_val == 0 || n_val >= n) {
    throw ConfigError("val fraction " + std::to_string(val_fraction) + " of " +
                      std::to_string(n) + " rows leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitPlan plan;
  plan.val_fraction = val_fraction;
  plan.seed = seed;
  plan.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  plan.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(plan.val.begin(), plan.val.end());
  std::sort(plan.train.begin(), plan.train.end());
  return plan;
}

std::vector<std::size_t> class_coverage(const LabelMatrix& labels,
                                        std::span<const std::size_t> indices) {
  std::vector<std::size_t> coverage(labels.cols());
  for (auto r : indices) {
    for (std::size_t c = 0; c < labels.cols(); ++c) coverage[c] += labels.positive(r, c);
  }
  return coverage;
}

EpochPlan plan_epoch(const LabelMatrix& labels, std::span<const std::size_t> train,
                     std::size_t min_per_class, std::uint64_t seed) {
  EpochPlan plan;
  plan.min_per_class = min_per_class;
  plan.seed = seed;
  plan.indices.assign(train.begin(), train.end());

  auto coverage = class_coverage(labels, train);
  auto add_replica = [&](std::size_t r) {
    plan.indices.push_back(r);
    for (std::size_t c = 0; c < labels.cols(); ++c) coverage[c] += labels.positive(r, c);
  };

  std::vector<std::size_t> positives;
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    if (coverage[c] == 0 || coverage[c] >= min_per_class) continue;
    positives.clear();
    for (auto r : train) {
      if (labels.positive(r, c)) positives.push_back(r);
    }
    for (std::size_t k = 0; coverage[c] < min_per_class; ++k) {
      add_replica(positives[k % positives.size()]);
    }
  }

  std::mt19937_64 rng(seed);
  std::shuffle(plan.indices.begin(), plan.indices.end(), rng);
  return plan;
}

std::vector<std::vector<std::size_t>> batches(const EpochPlan& plan, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < plan.indices.size(); start += batch_size) {
    auto end = std::min(start + batch_size, plan.indices.size());
    out.emplace_back(plan.indices.begin() + static_cast<std::ptrdiff_t>(start),
                     plan.indices.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace defr
