// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/classifier.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace defr {
namespace {

double checked_norm(std::span<const double> v, const char* what, std::size_t index) {
  double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericError(std::string(what) + " " + std::to_string(index) +
                       " has zero or non-finite norm");
  }
  return n;
}

std::vector<double> row_norms(const Matrix& w) {
  std::vector<double> norms(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) norms[i] = checked_norm(w.row(i), "weight row", i);
  return norms;
}

void check_dims(std::size_t x_dim, const Matrix& w) {
  if (x_dim != w.cols()) {
    throw DimensionError("feature dimension " + std::to_string(x_dim) +
                         " does not match weight dimension " + std::to_string(w.cols()));
  }
}

// Rounding can push |cos| past 1 by an ulp; the clamp keeps |s| <= gamma.
double cosine(std::span<const double> x, std::span<const double> w, double xn, double wn) {
  return std::clamp(dot(x, w) / (xn * wn), -1.0, 1.0);
}

}  // namespace

std::vector<double> forward(std::span<const double> x, const Matrix& w, double gamma) {
  check_dims(x.size(), w);
  double xn = checked_norm(x, "feature", 0);
  auto wn = row_norms(w);
  std::vector<double> s(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) s[i] = gamma * cosine(x, w.row(i), xn, wn[i]);
  return s;
}

Matrix forward_batch(const Matrix& features, const Matrix& w, double gamma) {
  check_dims(features.cols(), w);
  auto wn = row_norms(w);
  Matrix s(features.rows(), w.rows());
  for (std::size_t n = 0; n < features.rows(); ++n) {
    auto x = features.row(n);
    double xn = checked_norm(x, "feature row", n);
    auto out = s.row(n);
    for (std::size_t i = 0; i < w.rows(); ++i) out[i] = gamma * cosine(x, w.row(i), xn, wn[i]);
  }
  return s;
}

void accumulate_weight_grad(std::span<const double> x, const Matrix& w, double gamma,
                            std::span<const double> dL_ds, Matrix& grad) {
  check_dims(x.size(), w);
  if (dL_ds.size() != w.rows() || grad.rows() != w.rows() || grad.cols() != w.cols()) {
    throw DimensionError("gradient shape does not match weights");
  }
  double xn = checked_norm(x, "feature", 0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (dL_ds[i] == 0.0) continue;
    auto wi = w.row(i);
    double wn = checked_norm(wi, "weight row", i);
    double cos = cosine(x, wi, xn, wn);
    double a = dL_ds[i] * gamma / (xn * wn);
    double b = dL_ds[i] * gamma * cos / (wn * wn);
    auto g = grad.row(i);
    for (std::size_t d = 0; d < wi.size(); ++d) g[d] += a * x[d] - b * wi[d];
  }
}

Matrix weight_grad(std::span<const double> x, const Matrix& w, double gamma,
                   std::span<const double> dL_ds) {
  Matrix grad(w.rows(), w.cols());
  accumulate_weight_grad(x, w, gamma, dL_ds, grad);
  return grad;
}

Matrix weight_grad_batch(const Matrix& features, const Matrix& w, double gamma,
                         const Matrix& dL_ds) {
  if (dL_ds.rows() != features.rows() || dL_ds.cols() != w.rows()) {
    throw DimensionError("dL/ds must be N x C");
  }
  Matrix grad(w.rows(), w.cols());
  for (std::size_t n = 0; n < features.rows(); ++n) {
    accumulate_weight_grad(features.row(n), w, gamma, dL_ds.row(n), grad);
  }
  return grad;
}

ClassifierWeights init_from_embeddings(const Matrix& embeddings, double gamma) {
  if (embeddings.rows() == 0 || embeddings.cols() == 0) {
    throw ConfigError("embedding set is empty");
  }
  ClassifierWeights out{embeddings, gamma};
  for (std::size_t i = 0; i < out.w.rows(); ++i) {
    auto row = out.w.row(i);
    double n = checked_norm(row, "embedding row for class", i);
    for (auto& v : row) v /= n;
  }
  return out;
}

ClassifierWeights init_random(std::size_t num_classes, std::size_t dim, std::uint64_t seed,
                              double gamma) {
  if (num_classes == 0 || dim == 0) throw ConfigError("classifier shape must be at least 1x1");
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  ClassifierWeights out{Matrix(num_classes, dim), gamma};
  for (auto& v : out.w.data()) {
    // uniform_real_distribution is half-open; redraw the closed end.
    do {
      v = dist(rng);
    } while (v == -bound);
  }
  return out;
}

}  // namespace defr
