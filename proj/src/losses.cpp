// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace defr {
namespace {

void check_inputs(std::span<const double> s, std::span<const std::int8_t> y) {
  if (s.size() != y.size()) {
    throw DimensionError("logit length " + std::to_string(s.size()) +
                         " does not match label length " + std::to_string(y.size()));
  }
  if (s.empty()) throw DimensionError("loss needs at least one class");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1 && y[i] != -1) {
      throw ConfigError("label " + std::to_string(i) + " is not +1 or -1");
    }
  }
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kLseSign: return "lse-sign";
    case LossKind::kBce: return "bce";
    case LossKind::kWeightedBce: return "wbce";
    case LossKind::kFocal: return "focal";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "lse-sign") return LossKind::kLseSign;
  if (name == "bce") return LossKind::kBce;
  if (name == "wbce") return LossKind::kWeightedBce;
  if (name == "focal") return LossKind::kFocal;
  throw ConfigError("unknown loss '" + name + "' (expected lse-sign, bce, wbce or focal)");
}

double ClassStats::positive_weight(std::size_t i) const {
  if (positives[i] == 0) return 1.0;
  return static_cast<double>(negatives[i]) / static_cast<double>(positives[i]);
}

ClassStats compute_class_stats(const LabelMatrix& labels) {
  ClassStats stats{std::vector<std::size_t>(labels.cols()),
                   std::vector<std::size_t>(labels.cols())};
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      ++(labels.positive(r, c) ? stats.positives[c] : stats.negatives[c]);
    }
  }
  return stats;
}

ClassStats compute_class_stats(const LabelMatrix& labels, std::span<const std::size_t> rows) {
  return compute_class_stats(labels.select_rows(rows));
}

// LSE-Sign with the largest exponent factored out:
//   m = max(0, max_i z_i),  z_i = -y_i s_i
//   L = m + log(exp(-m) + sum_i exp(z_i - m))
// When m = 0 and the sum is small, log1p keeps precision for tiny losses.
double lse_sign_loss(std::span<const double> s, std::span<const std::int8_t> y) {
  check_inputs(s, y);
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, -y[i] * s[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += std::exp(-y[i] * s[i] - m);
  if (m == 0.0) return sum < 0.5 ? std::log1p(sum) : std::log(1.0 + sum);
  return m + std::log(std::exp(-m) + sum);
}

std::vector<double> lse_sign_grad(std::span<const double> s, std::span<const std::int8_t> y) {
  check_inputs(s, y);
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, -y[i] * s[i]);
  std::vector<double> g(s.size());
  double denom = std::exp(-m);
  for (std::size_t i = 0; i < s.size(); ++i) {
    g[i] = std::exp(-y[i] * s[i] - m);
    denom += g[i];
  }
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = -y[i] * g[i] / denom;
  return g;
}

double bce_loss(std::span<const double> s, std::span<const std::int8_t> y) {
  check_inputs(s, y);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += softplus(-y[i] * s[i]);
  return total / static_cast<double>(s.size());
}

std::vector<double> bce_grad(std::span<const double> s, std::span<const std::int8_t> y) {
  check_inputs(s, y);
  const double inv_c = 1.0 / static_cast<double>(s.size());
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = -y[i] * sigmoid(-y[i] * s[i]) * inv_c;
  return g;
}

double weighted_bce_loss(std::span<const double> s, std::span<const std::int8_t> y,
                         const ClassStats& stats) {
  check_inputs(s, y);
  if (stats.num_classes() != s.size()) throw DimensionError("class stats size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double term = softplus(-y[i] * s[i]);
    total += y[i] > 0 ? stats.positive_weight(i) * term : term;
  }
  return total / static_cast<double>(s.size());
}

std::vector<double> weighted_bce_grad(std::span<const double> s, std::span<const std::int8_t> y,
                                      const ClassStats& stats) {
  check_inputs(s, y);
  if (stats.num_classes() != s.size()) throw DimensionError("class stats size mismatch");
  const double inv_c = 1.0 / static_cast<double>(s.size());
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double weight = y[i] > 0 ? stats.positive_weight(i) : 1.0;
    g[i] = -y[i] * weight * sigmoid(-y[i] * s[i]) * inv_c;
  }
  return g;
}

// With margin t = y*s, q = 1 - p_t = sigmoid(-t) and -log p_t = softplus(-t):
//   term = alpha_t * q^g * softplus(-t)
//   dterm/dt = -alpha_t * q^g * (g * sigmoid(t) * softplus(-t) + q)
double focal_loss(std::span<const double> s, std::span<const std::int8_t> y,
                  FocalParams params) {
  check_inputs(s, y);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double t = y[i] * s[i];
    double alpha_t = y[i] > 0 ? params.alpha : 1.0 - params.alpha;
    total += alpha_t * std::pow(sigmoid(-t), params.gamma) * softplus(-t);
  }
  return total / static_cast<double>(s.size());
}

std::vector<double> focal_grad(std::span<const double> s, std::span<const std::int8_t> y,
                               FocalParams params) {
  check_inputs(s, y);
  const double inv_c = 1.0 / static_cast<double>(s.size());
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double t = y[i] * s[i];
    double alpha_t = y[i] > 0 ? params.alpha : 1.0 - params.alpha;
    double q = sigmoid(-t);
    double dt = -alpha_t * std::pow(q, params.gamma) *
                (params.gamma * sigmoid(t) * softplus(-t) + q);
    g[i] = y[i] * dt * inv_c;
  }
  return g;
}

Loss::Loss(LossKind kind, ClassStats stats, FocalParams focal)
    : kind_(kind), stats_(std::move(stats)), focal_(focal) {}

double Loss::value(std::span<const double> s, std::span<const std::int8_t> y) const {
  switch (kind_) {
    case LossKind::kLseSign: return lse_sign_loss(s, y);
    case LossKind::kBce: return bce_loss(s, y);
    case LossKind::kWeightedBce: return weighted_bce_loss(s, y, stats_);
    case LossKind::kFocal: return focal_loss(s, y, focal_);
  }
  return 0.0;
}

std::vector<double> Loss::grad(std::span<const double> s, std::span<const std::int8_t> y) const {
  switch (kind_) {
    case LossKind::kLseSign: return lse_sign_grad(s, y);
    case LossKind::kBce: return bce_grad(s, y);
    case LossKind::kWeightedBce: return weighted_bce_grad(s, y, stats_);
    case LossKind::kFocal: return focal_grad(s, y, focal_);
  }
  return {};
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    double d = analytic[i] - numeric[i];
    diff += d * d;
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  double scale = std::sqrt(std::max(na, nn));
  if (scale == 0.0) return 0.0;
  return std::sqrt(diff) / scale;
}

std::vector<double> numeric_grad(const Loss& loss, std::span<const double> s,
                                 std::span<const std::int8_t> y, double epsilon) {
  std::vector<double> probe(s.begin(), s.end());
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double orig = probe[i];
    probe[i] = orig + epsilon;
    double up = loss.value(probe, y);
    probe[i] = orig - epsilon;
    double down = loss.value(probe, y);
    probe[i] = orig;
    g[i] = (up - down) / (2.0 * epsilon);
  }
  return g;
}

GradcheckReport gradcheck(LossKind kind, const GradcheckOptions& options) {
  if (options.trials == 0) throw ConfigError("gradcheck needs at least one trial");
  if (options.max_classes == 0) throw ConfigError("gradcheck needs at least one class");
  if (!(options.epsilon > 0.0)) throw ConfigError("gradcheck epsilon must be positive");

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> num_classes(1, options.max_classes);
  std::uniform_real_distribution<double> logit(-options.logit_range, options.logit_range);
  std::bernoulli_distribution positive(0.5);
  std::uniform_int_distribution<std::size_t> count(0, 100);

  GradcheckReport report{kind, options.trials, options.seed, options.epsilon, 0.0};
  for (std::size_t t = 0; t < options.trials; ++t) {
    std::size_t c = num_classes(rng);
    std::vector<double> s(c);
    std::vector<std::int8_t> y(c);
    for (std::size_t i = 0; i < c; ++i) {
      s[i] = logit(rng);
      y[i] = positive(rng) ? 1 : -1;
    }
    ClassStats stats;
    if (kind == LossKind::kWeightedBce) {
      for (std::size_t i = 0; i < c; ++i) {
        std::size_t pos = count(rng);
        stats.positives.push_back(pos);
        stats.negatives.push_back(100 - pos);
      }
    }
    Loss loss(kind, std::move(stats));
    auto analytic = loss.grad(s, y);
    auto numeric = numeric_grad(loss, s, y, options.epsilon);
    report.max_rel_error = std::max(report.max_rel_error, relative_error(analytic, numeric));
  }
  return report;
}

}  // namespace defr
