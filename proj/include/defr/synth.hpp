// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic multi-label benchmark: class prototypes built from shared verb and
// object directions, power-law class frequencies, and "text embeddings" that
// are noisy copies of the prototypes.

#pragma once

#include <cstdint>
#include <string>

#include "defr/labelspace.hpp"
#include "defr/matrix.hpp"

namespace defr {

struct SynthConfig {
  std::size_t num_train = 3000;
  std::size_t num_test = 1000;
  std::size_t dim = 32;
  std::size_t num_verbs = 8;
  std::size_t num_objects = 8;
  /// Class frequency of the k-th most common class is proportional to
  /// (k + 1)^-zipf_exponent.
  double zipf_exponent = 1.2;
  /// Probability of each additional label that shares the first label's object.
  double extra_label_prob = 0.35;
  std::size_t max_labels = 3;
  /// Relative weight of the verb, object and class-specific directions.
  double verb_weight = 0.6;
  double object_weight = 0.6;
  double unique_weight = 0.55;
  /// Direction shared by every image, as in real backbone features.
  double shared_offset = 0.5;
  double feature_noise = 0.6;
  double text_noise = 0.8;
  std::uint64_t seed = 0;
};

struct SynthData {
  ClassList classes;
  Matrix prototypes;  // C×D, unit rows
  Matrix embeddings;  // C×D, unit rows
  Matrix features;
  LabelMatrix labels;
  Matrix test_features;
  LabelMatrix test_labels;
};

SynthData make_synth(const SynthConfig& config);

/// Linearly separable single-label set: N=512, D=16, C=8 by default.
SynthData make_separable(std::uint64_t seed, std::size_t num_train = 512,
                         std::size_t dim = 16, std::size_t num_classes = 8,
                         double noise = 0.05);

/// Writes classes.txt, features.bin, labels.bin, test_features.bin,
/// test_labels.bin and embeddings.bin (with sidecars) into `dir`.
void write_synth(const SynthData& data, const std::string& dir);

/// Canonical `verb object\n` serialization of a class list.
std::string serialize_class_list(const ClassList& classes);

}  // namespace defr
