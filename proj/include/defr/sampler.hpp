// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Train/validation split and class-balanced oversampling.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "defr/matrix.hpp"

namespace defr {

struct SplitPlan {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> val;    // ascending
  double val_fraction = 0.10;
  std::uint64_t seed = 0;
};

/// Uniform random split with |val| = round(val_fraction * n). Throws
/// ConfigError if either side would be empty.
SplitPlan split(std::size_t n, double val_fraction, std::uint64_t seed);

struct EpochPlan {
  std::vector<std::size_t> indices;  // row indices into the full label matrix
  std::size_t min_per_class = 40;
  std::uint64_t seed = 0;
};

/// Starts from one copy of every train row, then sweeps classes in ascending
/// order: a class whose positive coverage (replicas included) is below
/// `min_per_class` has its positive rows replicated round-robin until the floor
/// is met. Classes without train positives are skipped. The result is
/// shuffled with `seed`.
EpochPlan plan_epoch(const LabelMatrix& labels, std::span<const std::size_t> train,
                     std::size_t min_per_class, std::uint64_t seed);

/// Positive coverage of each class in `indices`.
std::vector<std::size_t> class_coverage(const LabelMatrix& labels,
                                        std::span<const std::size_t> indices);

/// Consecutive chunks of the plan; the last one may be short.
std::vector<std::vector<std::size_t>> batches(const EpochPlan& plan, std::size_t batch_size);

}  // namespace defr
