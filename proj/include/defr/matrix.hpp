// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "defr/error.hpp"

namespace defr {

/// Dense row-major matrix of doubles. Used for features, embeddings and
/// classifier weights; persisted as float32 by dataio.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data size does not match shape");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// N×C matrix over {+1, -1}.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, -1) {}
  LabelMatrix(std::size_t rows, std::size_t cols, std::vector<std::int8_t> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::int8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, bool positive) {
    data_[r * cols_ + c] = positive ? 1 : -1;
  }
  bool positive(std::size_t r, std::size_t c) const { return data_[r * cols_ + c] > 0; }

  std::span<const std::int8_t> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const std::int8_t> data() const noexcept { return data_; }

  /// Rows `indices` in the given order.
  LabelMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const LabelMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Rows `indices` of `m` in the given order.
Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);

/// Copy with every entry rounded through float32, i.e. the values a
/// float32 container would hold.
Matrix round_to_float(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace defr
