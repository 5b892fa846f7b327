// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/matrix.hpp"

#include <algorithm>

namespace defr {

LabelMatrix::LabelMatrix(std::size_t rows, std::size_t cols,
                         std::vector<std::int8_t> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("label data size does not match shape");
  }
  for (auto v : data_) {
    if (v != 1 && v != -1) throw ConfigError("label values must be +1 or -1");
  }
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::size_t> indices) const {
  LabelMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.data_.begin() + k * cols_);
  }
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto src = m.row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

Matrix round_to_float(const Matrix& m) {
  Matrix out = m;
  for (auto& v : out.data()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace defr
