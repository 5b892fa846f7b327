// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Training and evaluation driver: split -> per-epoch oversampled plan ->
// cosine logits -> loss -> weight gradient -> Adam with cosine warm restarts.
// Every run is a deterministic function of its inputs and seed.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "defr/classifier.hpp"
#include "defr/labelspace.hpp"
#include "defr/losses.hpp"
#include "defr/matrix.hpp"
#include "defr/metrics.hpp"

namespace defr {

enum class InitKind { kRandom, kEmbeddings };

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

struct TrainConfig {
  std::string features_path;
  std::string labels_path;
  std::string classes_path;
  InitKind init = InitKind::kRandom;
  std::string embeddings_path;
  LossKind loss = LossKind::kLseSign;
  double gamma = kDefaultGamma;
  // 1e-5 is the better choice for features already aligned with the text
  // embeddings.
  double base_lr = 1e-4;
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  std::size_t min_per_class = 40;
  double val_fraction = 0.10;
  std::size_t restart_period = 5;
  std::uint64_t seed = 0;
  /// Optional outputs and held-out test set.
  std::string checkpoint_path;
  std::string test_features_path;
  std::string test_labels_path;

  /// Throws ConfigError on non-positive hyperparameters.
  void validate() const;
};

/// Training setup for the shipped synthetic benchmark: the defaults above with
/// a learning rate sized for a linear head on frozen features (about 30
/// steps per epoch instead of thousands).
TrainConfig benchmark_config(std::uint64_t seed);

/// Everything train() consumes, already in memory.
struct TrainInputs {
  Matrix features;
  LabelMatrix labels;
  ClassList classes;
  std::optional<Matrix> embeddings;
  std::optional<Matrix> test_features;
  std::optional<LabelMatrix> test_labels;
};

/// Reads the files named in `config` and checks that their shapes agree.
TrainInputs load_inputs(const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per-sample loss over the epoch plan
  double train_map = 0.0;
  double val_map = 0.0;
  double lr_last = 0.0;
  std::uint64_t steps_end = 0;  // global step counter after the epoch

  bool operator==(const EpochRecord&) const = default;
};

struct RunRecord {
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_map = 0.0;
  std::optional<double> test_map;  // of the best-validation weights
  std::string checkpoint_path;
  double wall_time_s = 0.0;

  double final_val_map() const { return epochs.back().val_map; }
  double final_train_map() const { return epochs.back().train_map; }

  /// JSON document. Wall time is excluded unless requested so that records of
  /// identical runs compare equal byte for byte.
  std::string to_json(bool include_timing = true) const;
};

struct TrainResult {
  RunRecord record;
  ClassifierWeights initial;
  ClassifierWeights final;  // after the last epoch
  ClassifierWeights best;   // best validation mAP, float32-rounded as saved
};

/// In-memory training. Validation and train mAP are computed with the
/// float32-rounded weights, i.e. exactly the weights a checkpoint holds.
/// Throws NumericError naming the global step if a batch loss is non-finite.
TrainResult train(const TrainInputs& inputs, const TrainConfig& config,
                  std::ostream* log = nullptr);

/// load_inputs + train + checkpoint (when config.checkpoint_path is set).
TrainResult train(const TrainConfig& config, std::ostream* log = nullptr);

void save_checkpoint(const ClassifierWeights& weights, const ClassList& classes,
                     const std::string& path);

struct EvalConfig {
  std::string weights_path;
  std::string features_path;
  std::string labels_path;
  /// Overrides the checkpoint's gamma; a disagreement is logged as a warning.
  std::optional<double> gamma;
};

/// gamma resolution: flag if given, else sidecar, else the default. A missing
/// sidecar gamma or a flag that disagrees with it produces a warning on `log`.
ApReport evaluate(const EvalConfig& config, std::ostream* log = nullptr);

/// Scores `features` with `weights` and runs map_eval.
ApReport evaluate(const ClassifierWeights& weights, const Matrix& features,
                  const LabelMatrix& labels);

struct GammaRow {
  double gamma = 0.0;
  double final_val_map = 0.0;
  double best_val_map = 0.0;
};

/// One training run per gamma with the same seed.
std::vector<GammaRow> sweep_gamma(const TrainInputs& inputs, const TrainConfig& config,
                                  const std::vector<double>& gammas, std::ostream* log = nullptr);
std::string format_gamma_table(const std::vector<GammaRow>& rows);

struct AblationCell {
  InitKind init = InitKind::kRandom;
  LossKind loss = LossKind::kLseSign;
  double final_val_map = 0.0;
  double best_val_map = 0.0;
  double nn_overlap = 0.0;       // initial vs final weights, k = 5
  double frobenius_drift = 0.0;
};

/// {random, embeddings} x {bce, lse-sign}, shared seed. Requires embeddings.
std::vector<AblationCell> ablate(const TrainInputs& inputs, const TrainConfig& config,
                                 std::ostream* log = nullptr);
std::string format_ablation_table(const std::vector<AblationCell>& cells);

}  // namespace defr
