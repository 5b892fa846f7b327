// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "defr/matrix.hpp"

namespace defr {

/// Non-interpolated AP: scores are sorted descending (ties broken by ascending
/// index) and precision is averaged over the ranks of the positives.
/// Returns nullopt when there are no positives; such classes are skipped, not
/// scored as zero.
std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::int8_t> labels);

struct ApReport {
  std::vector<double> per_class_ap;  // NaN for skipped classes
  double map = 0.0;
  std::vector<std::size_t> skipped_classes;

  /// {"map": ..., "per_class_ap": [...], "skipped": [...]}; skipped classes
  /// appear as null in per_class_ap.
  std::string to_json() const;
};

/// Per-class AP over the columns of an N×C score matrix. Throws ConfigError
/// when every class is skipped.
ApReport map_eval(const Matrix& scores, const LabelMatrix& labels);

struct DriftReport {
  double frobenius_drift = 0.0;
  double nn_overlap = 0.0;
  std::size_t k = 5;
};

/// Compares the row-cosine geometry of two weight matrices.
/// frobenius_drift = |S_init - S_final|_F / C, nn_overlap = mean over classes
/// of the shared fraction of k nearest neighbours (self excluded).
DriftReport structure_drift(const Matrix& w_init, const Matrix& w_final, std::size_t k = 5);

/// C×C matrix of row cosine similarities.
Matrix row_cosine_similarity(const Matrix& w);

}  // namespace defr
