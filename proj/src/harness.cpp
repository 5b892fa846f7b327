// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "defr/dataio.hpp"
#include "defr/optim.hpp"
#include "defr/sampler.hpp"
#include "defr/synth.hpp"
#include "json.hpp"

namespace defr {
namespace {

enum class Stream : std::uint64_t { kSplit = 1, kInit = 2, kEpoch = 3 };

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_same_rows(const Matrix& features, const LabelMatrix& labels, const std::string& what) {
  if (features.rows() != labels.rows()) {
    throw DimensionError(what + ": features have " + std::to_string(features.rows()) +
                         " rows but labels have " + std::to_string(labels.rows()));
  }
}

nlohmann::ordered_json config_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["features_path"] = c.features_path;
  j["labels_path"] = c.labels_path;
  j["classes_path"] = c.classes_path;
  j["init"] = to_string(c.init);
  j["embeddings_path"] = c.embeddings_path;
  j["loss"] = to_string(c.loss);
  j["gamma"] = c.gamma;
  j["base_lr"] = c.base_lr;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["min_per_class"] = c.min_per_class;
  j["val_fraction"] = c.val_fraction;
  j["restart_period"] = c.restart_period;
  j["seed"] = c.seed;
  j["checkpoint_path"] = c.checkpoint_path;
  j["test_features_path"] = c.test_features_path;
  j["test_labels_path"] = c.test_labels_path;
  return j;
}

}  // namespace

std::string to_string(InitKind kind) {
  return kind == InitKind::kRandom ? "random" : "embeddings";
}

InitKind init_kind_from_string(const std::string& name) {
  if (name == "random") return InitKind::kRandom;
  if (name == "embeddings") return InitKind::kEmbeddings;
  throw ConfigError("unknown init '" + name + "' (expected random or embeddings)");
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ConfigError("base-lr must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch-size must be positive");
  if (min_per_class == 0) throw ConfigError("min-per-class must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val-fraction must lie in (0, 1)");
  }
  if (restart_period == 0) throw ConfigError("restart-period must be positive");
  if (test_features_path.empty() != test_labels_path.empty()) {
    throw ConfigError("test-features and test-labels must be given together");
  }
}

TrainConfig benchmark_config(std::uint64_t seed) {
  TrainConfig config;
  config.base_lr = 4e-3;
  config.seed = seed;
  return config;
}

TrainInputs load_inputs(const TrainConfig& config) {
  config.validate();
  if (config.features_path.empty() || config.labels_path.empty() ||
      config.classes_path.empty()) {
    throw ConfigError("features, labels and classes paths are required");
  }
  TrainInputs in;
  in.features = read_features(config.features_path);
  in.labels = read_labels(config.labels_path);
  in.classes = read_class_list(config.classes_path);
  check_same_rows(in.features, in.labels, "training set");
  if (in.labels.cols() != in.classes.size()) {
    throw DimensionError("labels have " + std::to_string(in.labels.cols()) +
                         " columns but the class list has " +
                         std::to_string(in.classes.size()) + " classes");
  }
  if (config.init == InitKind::kEmbeddings) {
    if (config.embeddings_path.empty()) {
      throw ConfigError("init=embeddings requires an embeddings path");
    }
    auto e = read_matrix(config.embeddings_path);
    if (e.dtype != DType::kFloat32) throw FormatError("embeddings must be float32");
    in.embeddings = std::move(e.values);
  }
  if (!config.test_features_path.empty()) {
    in.test_features = read_features(config.test_features_path);
    in.test_labels = read_labels(config.test_labels_path);
    check_same_rows(*in.test_features, *in.test_labels, "test set");
  }
  return in;
}

TrainResult train(const TrainInputs& in, const TrainConfig& config, std::ostream* log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t num_classes = in.labels.cols();
  const std::size_t dim = in.features.cols();
  check_same_rows(in.features, in.labels, "training set");
  if (in.classes.size() != 0 && in.classes.size() != num_classes) {
    throw DimensionError("labels have " + std::to_string(num_classes) +
                         " columns but the class list has " +
                         std::to_string(in.classes.size()) + " classes");
  }

  ClassifierWeights weights;
  if (config.init == InitKind::kEmbeddings) {
    if (!in.embeddings) throw ConfigError("init=embeddings requires an embedding set");
    if (in.embeddings->cols() != dim) {
      throw DimensionError("embedding dimension " + std::to_string(in.embeddings->cols()) +
                           " does not match feature dimension " + std::to_string(dim));
    }
    if (in.embeddings->rows() != num_classes) {
      throw DimensionError("embedding set has " + std::to_string(in.embeddings->rows()) +
                           " rows but labels have " + std::to_string(num_classes) +
                           " classes");
    }
    weights = init_from_embeddings(*in.embeddings, config.gamma);
  } else {
    weights = init_random(num_classes, dim, derive_seed(config.seed, Stream::kInit),
                          config.gamma);
  }

  TrainResult result;
  result.initial = weights;
  RunRecord& record = result.record;
  record.config = config;

  const auto plan_split = split(in.features.rows(), config.val_fraction,
                                derive_seed(config.seed, Stream::kSplit));
  const Matrix train_features = select_rows(in.features, plan_split.train);
  const LabelMatrix train_labels = in.labels.select_rows(plan_split.train);
  const Matrix val_features = select_rows(in.features, plan_split.val);
  const LabelMatrix val_labels = in.labels.select_rows(plan_split.val);

  const Loss loss(config.loss, compute_class_stats(train_labels));
  AdamState adam(num_classes, dim);

  // Every epoch plan has the same length; only the order changes.
  const std::size_t plan_size =
      plan_epoch(in.labels, plan_split.train, config.min_per_class, 0).indices.size();
  Schedule schedule{config.base_lr, 0.0, config.restart_period,
                    (plan_size + config.batch_size - 1) / config.batch_size};

  std::uint64_t step = 0;
  Matrix grad(num_classes, dim);
  std::vector<double> logits;
  double best_map = -1.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto plan = plan_epoch(in.labels, plan_split.train, config.min_per_class,
                           derive_seed(config.seed, Stream::kEpoch, epoch));
    double loss_sum = 0.0;
    double lr = 0.0;
    for (const auto& batch : batches(plan, config.batch_size)) {
      std::fill(grad.data().begin(), grad.data().end(), 0.0);
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      double batch_loss = 0.0;
      for (auto r : batch) {
        auto x = in.features.row(r);
        auto y = in.labels.row(r);
        logits = forward(x, weights.w, weights.gamma);
        batch_loss += loss.value(logits, y);
        auto g = loss.grad(logits, y);
        for (auto& v : g) v *= inv_b;
        accumulate_weight_grad(x, weights.w, weights.gamma, g, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at step " + std::to_string(step));
      }
      loss_sum += batch_loss;
      lr = lr_at(schedule, step);
      adam_step(weights.w, grad, adam, lr);
      ++step;
    }

    auto snapshot = ClassifierWeights{round_to_float(weights.w), weights.gamma};
    EpochRecord er;
    er.epoch = epoch + 1;
    er.train_loss = loss_sum / static_cast<double>(plan.indices.size());
    er.train_map = evaluate(snapshot, train_features, train_labels).map;
    er.val_map = evaluate(snapshot, val_features, val_labels).map;
    er.lr_last = lr;
    er.steps_end = step;
    record.epochs.push_back(er);
    if (er.val_map > best_map) {
      best_map = er.val_map;
      record.best_epoch = er.epoch;
      record.best_val_map = er.val_map;
      result.best = std::move(snapshot);
    }
    if (log) {
      *log << "epoch " << er.epoch << " loss " << er.train_loss << " train_map " << er.train_map
           << " val_map " << er.val_map << " lr " << er.lr_last << "\n";
    }
  }
  result.final = weights;

  if (in.test_features) {
    if (!in.test_labels) throw ConfigError("test features given without test labels");
    record.test_map = evaluate(result.best, *in.test_features, *in.test_labels).map;
  }
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

TrainResult train(const TrainConfig& config, std::ostream* log) {
  auto inputs = load_inputs(config);
  auto result = train(inputs, config, log);
  if (!config.checkpoint_path.empty()) {
    save_checkpoint(result.best, inputs.classes, config.checkpoint_path);
    result.record.checkpoint_path = config.checkpoint_path;
  }
  return result;
}

void save_checkpoint(const ClassifierWeights& weights, const ClassList& classes,
                     const std::string& path) {
  write_matrix(weights.w, DType::kFloat32, path);
  std::string text = serialize_class_list(classes);
  write_sidecar(path,
                {Role::kWeights,
                 sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}),
                 weights.gamma});
}

std::string RunRecord::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["config"] = config_json(config);
  auto epochs_json = nlohmann::ordered_json::array();
  for (const auto& e : epochs) {
    nlohmann::ordered_json ej;
    ej["epoch"] = e.epoch;
    ej["train_loss"] = e.train_loss;
    ej["train_map"] = e.train_map;
    ej["val_map"] = e.val_map;
    ej["lr_last"] = e.lr_last;
    ej["steps_end"] = e.steps_end;
    epochs_json.push_back(ej);
  }
  j["epochs"] = epochs_json;
  j["best_epoch"] = best_epoch;
  j["best_val_map"] = best_val_map;
  j["selection"] = "best validation mAP, earliest epoch on ties";
  if (test_map) {
    j["test_map"] = *test_map;
  } else {
    j["test_map"] = nullptr;
  }
  j["checkpoint_path"] = checkpoint_path;
  if (include_timing) j["wall_time_s"] = wall_time_s;
  return j.dump(2);
}

ApReport evaluate(const ClassifierWeights& weights, const Matrix& features,
                  const LabelMatrix& labels) {
  check_same_rows(features, labels, "evaluation set");
  if (labels.cols() != weights.num_classes()) {
    throw DimensionError("labels have " + std::to_string(labels.cols()) +
                         " classes but weights have " + std::to_string(weights.num_classes()));
  }
  return map_eval(forward_batch(features, weights.w, weights.gamma), labels);
}

ApReport evaluate(const EvalConfig& config, std::ostream* log) {
  auto loaded = read_matrix(config.weights_path);
  if (loaded.dtype != DType::kFloat32) throw FormatError("weights must be float32");
  auto meta = read_sidecar(config.weights_path);
  std::optional<double> stored = meta ? meta->gamma : std::nullopt;

  double gamma = kDefaultGamma;
  if (config.gamma) {
    gamma = *config.gamma;
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!stored) {
      if (log) *log << "warning: checkpoint sidecar has no gamma; using --gamma " << gamma << "\n";
    } else if (*stored != gamma) {
      if (log) {
        *log << "warning: --gamma " << gamma << " differs from checkpoint gamma " << *stored
             << "\n";
      }
    }
  } else if (stored) {
    gamma = *stored;
  } else if (log) {
    *log << "warning: checkpoint sidecar has no gamma; using default " << gamma << "\n";
  }

  auto features = read_features(config.features_path);
  auto labels = read_labels(config.labels_path);
  if (features.cols() != loaded.values.cols()) {
    throw DimensionError("feature dimension " + std::to_string(features.cols()) +
                         " does not match weight dimension " +
                         std::to_string(loaded.values.cols()));
  }
  return evaluate(ClassifierWeights{std::move(loaded.values), gamma}, features, labels);
}

std::vector<GammaRow> sweep_gamma(const TrainInputs& inputs, const TrainConfig& config,
                                  const std::vector<double>& gammas, std::ostream* log) {
  if (gammas.empty()) throw ConfigError("sweep needs at least one gamma");
  for (double g : gammas) {
    if (!(g > 0.0)) throw ConfigError("gamma values must be positive");
  }
  std::vector<GammaRow> rows;
  for (double g : gammas) {
    TrainConfig c = config;
    c.gamma = g;
    if (log) *log << "sweep: gamma " << g << "\n";
    auto result = train(inputs, c, log);
    rows.push_back({g, result.record.final_val_map(), result.record.best_val_map});
  }
  return rows;
}

std::string format_gamma_table(const std::vector<GammaRow>& rows) {
  std::ostringstream out;
  out << std::setw(10) << "gamma" << std::setw(14) << "final_val_map" << std::setw(14)
      << "best_val_map" << "\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    out << std::setw(10) << std::setprecision(1) << r.gamma << std::setprecision(6)
        << std::setw(14) << r.final_val_map << std::setw(14) << r.best_val_map << "\n";
  }
  return out.str();
}

std::vector<AblationCell> ablate(const TrainInputs& inputs, const TrainConfig& config,
                                 std::ostream* log) {
  if (!inputs.embeddings) throw ConfigError("ablation requires an embeddings path");
  const std::size_t k = std::min<std::size_t>(5, inputs.labels.cols() - 1);
  std::vector<AblationCell> cells;
  for (auto init : {InitKind::kRandom, InitKind::kEmbeddings}) {
    for (auto loss : {LossKind::kBce, LossKind::kLseSign}) {
      TrainConfig c = config;
      c.init = init;
      c.loss = loss;
      if (log) *log << "ablate: init " << to_string(init) << " loss " << to_string(loss) << "\n";
      auto result = train(inputs, c, log);
      AblationCell cell{init, loss, result.record.final_val_map(), result.record.best_val_map};
      if (k >= 1) {
        auto drift = structure_drift(result.initial.w, result.final.w, k);
        cell.nn_overlap = drift.nn_overlap;
        cell.frobenius_drift = drift.frobenius_drift;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string format_ablation_table(const std::vector<AblationCell>& cells) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "init" << std::setw(10) << "loss" << std::right
      << std::setw(15) << "final_val_map" << std::setw(14) << "best_val_map" << std::setw(14)
      << "nn_overlap@5" << std::setw(12) << "drift" << "\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& c : cells) {
    out << std::left << std::setw(12) << to_string(c.init) << std::setw(10) << to_string(c.loss)
        << std::right << std::setw(15) << c.final_val_map << std::setw(14) << c.best_val_map
        << std::setw(14) << c.nn_overlap << std::setw(12) << c.frobenius_drift << "\n";
  }
  return out.str();
}

}  // namespace defr
