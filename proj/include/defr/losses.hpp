// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Multi-label losses on logit vectors s with labels y in {+1, -1}^C.
//
// LSE-Sign:  L = log(1 + sum_i exp(-y_i s_i)), per sample.
// BCE, weighted BCE and focal loss average over classes.
// Every loss has an analytic dL/ds; gradcheck compares it with central
// differences.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "defr/matrix.hpp"

namespace defr {

enum class LossKind { kLseSign, kBce, kWeightedBce, kFocal };

std::string to_string(LossKind kind);
/// Accepts "lse-sign", "bce", "wbce", "focal".
LossKind loss_kind_from_string(const std::string& name);

/// Per-class positive/negative counts over the training split.
struct ClassStats {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;

  std::size_t num_classes() const noexcept { return positives.size(); }
  /// N-/N+ for class i, or 1 when the class has no positives.
  double positive_weight(std::size_t i) const;
};

ClassStats compute_class_stats(const LabelMatrix& labels);
ClassStats compute_class_stats(const LabelMatrix& labels, std::span<const std::size_t> rows);

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.25;
};

double lse_sign_loss(std::span<const double> s, std::span<const std::int8_t> y);
std::vector<double> lse_sign_grad(std::span<const double> s, std::span<const std::int8_t> y);

double bce_loss(std::span<const double> s, std::span<const std::int8_t> y);
std::vector<double> bce_grad(std::span<const double> s, std::span<const std::int8_t> y);

double weighted_bce_loss(std::span<const double> s, std::span<const std::int8_t> y,
                         const ClassStats& stats);
std::vector<double> weighted_bce_grad(std::span<const double> s, std::span<const std::int8_t> y,
                                      const ClassStats& stats);

double focal_loss(std::span<const double> s, std::span<const std::int8_t> y,
                  FocalParams params = {});
std::vector<double> focal_grad(std::span<const double> s, std::span<const std::int8_t> y,
                               FocalParams params = {});

/// Dispatches on kind. `stats` is consulted only for kWeightedBce.
class Loss {
 public:
  explicit Loss(LossKind kind, ClassStats stats = {}, FocalParams focal = {});

  LossKind kind() const noexcept { return kind_; }
  double value(std::span<const double> s, std::span<const std::int8_t> y) const;
  std::vector<double> grad(std::span<const double> s, std::span<const std::int8_t> y) const;

 private:
  LossKind kind_;
  ClassStats stats_;
  FocalParams focal_;
};

struct GradcheckOptions {
  std::size_t trials = 100;
  std::size_t max_classes = 16;
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  /// Logits are drawn uniform on [-logit_range, logit_range].
  double logit_range = 5.0;
};

struct GradcheckReport {
  LossKind kind = LossKind::kLseSign;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double max_rel_error = 0.0;

  bool operator==(const GradcheckReport&) const = default;
};

/// Relative error between an analytic and a numeric gradient:
/// |a - n|_2 / max(|a|_2, |n|_2), or 0 when both vanish.
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// Central-difference dL/ds of `loss` at (s, y).
std::vector<double> numeric_grad(const Loss& loss, std::span<const double> s,
                                 std::span<const std::int8_t> y, double epsilon);

/// Random (s, y) instances with C uniform on [1, max_classes]. For weighted
/// BCE each trial also draws random class statistics.
GradcheckReport gradcheck(LossKind kind, const GradcheckOptions& options);

}  // namespace defr
