// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Bias-free cosine classifier: s_i = gamma * cos(x, w_i).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "defr/matrix.hpp"

namespace defr {

inline constexpr double kDefaultGamma = 100.0;

/// C×D weights, one proxy row per class, plus the fixed logit scale.
struct ClassifierWeights {
  Matrix w;
  double gamma = kDefaultGamma;

  std::size_t num_classes() const noexcept { return w.rows(); }
  std::size_t dim() const noexcept { return w.cols(); }
};

/// Logits for a single feature row. Throws NumericError on zero-norm input or
/// zero-norm weight rows.
std::vector<double> forward(std::span<const double> x, const Matrix& w, double gamma);

/// N×C logits for a feature batch.
Matrix forward_batch(const Matrix& features, const Matrix& w, double gamma);

/// dL/dW for one sample given dL/ds. Row i is
///   dL_ds[i] * gamma * (x / (|x||w_i|) - cos_i * w_i / |w_i|^2).
Matrix weight_grad(std::span<const double> x, const Matrix& w, double gamma,
                   std::span<const double> dL_ds);

/// Adds `weight_grad(x, ...)` into `grad` without allocating.
void accumulate_weight_grad(std::span<const double> x, const Matrix& w, double gamma,
                            std::span<const double> dL_ds, Matrix& grad);

/// Sum of per-sample gradients over the rows of `features`, reduced in row
/// order. `dL_ds` is N×C.
Matrix weight_grad_batch(const Matrix& features, const Matrix& w, double gamma,
                         const Matrix& dL_ds);

/// Unit-normalizes each embedding row. Throws NumericError naming the class
/// index of any zero row.
ClassifierWeights init_from_embeddings(const Matrix& embeddings, double gamma = kDefaultGamma);

/// Entries i.i.d. uniform on the open interval (-1/sqrt(D), 1/sqrt(D)).
ClassifierWeights init_random(std::size_t num_classes, std::size_t dim, std::uint64_t seed,
                              double gamma = kDefaultGamma);

}  // namespace defr
