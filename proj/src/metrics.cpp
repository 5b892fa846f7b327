// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace defr {

std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size()) throw DimensionError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double precision_sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] > 0) {
      ++hits;
      precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return precision_sum / static_cast<double>(hits);
}

ApReport map_eval(const Matrix& scores, const LabelMatrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw DimensionError("score matrix " + std::to_string(scores.rows()) + "x" +
                         std::to_string(scores.cols()) + " does not match labels " +
                         std::to_string(labels.rows()) + "x" + std::to_string(labels.cols()));
  }
  const std::size_t n = scores.rows();
  ApReport report;
  report.per_class_ap.assign(scores.cols(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> column(n);
  std::vector<std::int8_t> column_labels(n);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      column[r] = scores(r, c);
      column_labels[r] = labels(r, c);
    }
    auto ap = average_precision(column, column_labels);
    if (!ap) {
      report.skipped_classes.push_back(c);
      continue;
    }
    report.per_class_ap[c] = *ap;
    sum += *ap;
    ++counted;
  }
  if (counted == 0) throw ConfigError("no class has a positive example; mAP undefined");
  report.map = sum / static_cast<double>(counted);
  return report;
}

std::string ApReport::to_json() const {
  nlohmann::ordered_json j;
  j["map"] = map;
  auto per_class = nlohmann::json::array();
  for (double ap : per_class_ap) {
    if (std::isnan(ap)) {
      per_class.push_back(nullptr);
    } else {
      per_class.push_back(ap);
    }
  }
  j["per_class_ap"] = per_class;
  j["skipped"] = skipped_classes;
  return j.dump();
}

Matrix row_cosine_similarity(const Matrix& w) {
  const std::size_t c = w.rows();
  std::vector<double> norms(c);
  for (std::size_t i = 0; i < c; ++i) {
    norms[i] = norm(w.row(i));
    if (norms[i] == 0.0) throw NumericError("row " + std::to_string(i) + " has zero norm");
  }
  Matrix s(c, c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i; j < c; ++j) {
      double v = dot(w.row(i), w.row(j)) / (norms[i] * norms[j]);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

namespace {

std::vector<std::size_t> nearest(const Matrix& sim, std::size_t i, std::size_t k) {
  std::vector<std::size_t> order;
  order.reserve(sim.rows() - 1);
  for (std::size_t j = 0; j < sim.rows(); ++j) {
    if (j != i) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sim(i, a) > sim(i, b); });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

DriftReport structure_drift(const Matrix& w_init, const Matrix& w_final, std::size_t k) {
  if (w_init.rows() != w_final.rows() || w_init.cols() != w_final.cols()) {
    throw DimensionError("weight matrices differ in shape");
  }
  const std::size_t c = w_init.rows();
  if (c < 2) throw ConfigError("structure drift needs at least 2 classes");
  if (k == 0 || k >= c) {
    throw ConfigError("k must lie in [1, " + std::to_string(c - 1) + "]");
  }
  auto s_init = row_cosine_similarity(w_init);
  auto s_final = row_cosine_similarity(w_final);

  double sq = 0.0;
  for (std::size_t i = 0; i < s_init.data().size(); ++i) {
    double d = s_init.data()[i] - s_final.data()[i];
    sq += d * d;
  }

  double overlap = 0.0;
  std::vector<std::size_t> shared;
  for (std::size_t i = 0; i < c; ++i) {
    auto a = nearest(s_init, i, k);
    auto b = nearest(s_final, i, k);
    shared.clear();
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    overlap += static_cast<double>(shared.size()) / static_cast<double>(k);
  }
  return {std::sqrt(sq) / static_cast<double>(c), overlap / static_cast<double>(c), k};
}

}  // namespace defr
