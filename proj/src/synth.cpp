// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "defr/dataio.hpp"

namespace defr {
namespace {

constexpr std::array<const char*, 12> kVerbs = {"ride",  "hold",    "cut",  "eat",
                                                "carry", "wash",    "push", "kick",
                                                "throw", "inspect", "open", "feed"};
constexpr std::array<const char*, 12> kObjects = {
    "bicycle", "carrot", "apple",        "boat",   "horse",    "umbrella",
    "kite",    "orange", "dining_table", "oven",   "elephant", "skateboard"};

std::string token(const auto& pool, std::size_t i, const char* prefix) {
  if (i < pool.size()) return pool[i];
  return std::string(prefix) + std::to_string(i);
}

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

void normalize(std::span<double> v) {
  double n = norm(v);
  for (auto& x : v) x /= n;
}

std::vector<double> unit_gaussian(std::mt19937_64& rng, std::size_t dim) {
  auto v = gaussian(rng, dim, 1.0);
  normalize(v);
  return v;
}

// Noise vector whose expected squared norm is scale^2.
std::vector<double> noise(std::mt19937_64& rng, std::size_t dim, double scale) {
  return gaussian(rng, dim, scale / std::sqrt(static_cast<double>(dim)));
}

Matrix noisy_copy(const Matrix& rows, std::mt19937_64& rng, double scale) {
  Matrix out = rows;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    auto e = noise(rng, out.cols(), scale);
    for (std::size_t d = 0; d < row.size(); ++d) row[d] += e[d];
    normalize(row);
  }
  return out;
}

struct LabelSampler {
  std::size_t num_verbs;
  std::size_t num_objects;
  std::vector<double> freq;  // per class

  std::vector<std::size_t> draw(std::mt19937_64& rng, double extra_prob,
                                std::size_t max_labels) const {
    std::discrete_distribution<std::size_t> primary(freq.begin(), freq.end());
    std::vector<std::size_t> labels{primary(rng)};
    std::size_t object = labels[0] % num_objects;
    std::bernoulli_distribution extra(extra_prob);
    while (labels.size() < max_labels && extra(rng)) {
      std::vector<double> w(num_verbs);
      for (std::size_t v = 0; v < num_verbs; ++v) {
        std::size_t c = v * num_objects + object;
        w[v] = std::find(labels.begin(), labels.end(), c) == labels.end() ? freq[c] : 0.0;
      }
      if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) break;
      std::discrete_distribution<std::size_t> verb(w.begin(), w.end());
      labels.push_back(verb(rng) * num_objects + object);
    }
    return labels;
  }
};

void sample_images(const SynthConfig& config, const LabelSampler& sampler, const Matrix& protos,
                   std::span<const double> shared, std::size_t n, std::mt19937_64& rng,
                   Matrix& features, LabelMatrix& labels) {
  const std::size_t dim = protos.cols();
  features = Matrix(n, dim);
  labels = LabelMatrix(n, protos.rows());
  for (std::size_t r = 0; r < n; ++r) {
    auto classes = sampler.draw(rng, config.extra_label_prob, config.max_labels);
    auto x = features.row(r);
    for (std::size_t d = 0; d < dim; ++d) x[d] = config.shared_offset * shared[d];
    for (auto c : classes) {
      labels.set(r, c, true);
      auto p = protos.row(c);
      for (std::size_t d = 0; d < dim; ++d) x[d] += p[d];
    }
    auto e = noise(rng, dim, config.feature_noise);
    for (std::size_t d = 0; d < dim; ++d) x[d] += e[d];
  }
  features = round_to_float(features);
}

}  // namespace

std::string serialize_class_list(const ClassList& classes) {
  std::string out;
  for (const auto& l : classes) out += l.verb + " " + l.object + "\n";
  return out;
}

SynthData make_synth(const SynthConfig& config) {
  if (config.num_verbs == 0 || config.num_objects == 0 || config.dim == 0) {
    throw ConfigError("synth: verbs, objects and dim must be positive");
  }
  if (config.num_train < 2 || config.max_labels == 0) {
    throw ConfigError("synth: need at least 2 training images and 1 label per image");
  }
  const std::size_t num_classes = config.num_verbs * config.num_objects;
  const std::size_t dim = config.dim;
  std::mt19937_64 rng(config.seed);

  SynthData data;
  std::vector<HoiLabel> labels;
  for (std::size_t v = 0; v < config.num_verbs; ++v) {
    for (std::size_t o = 0; o < config.num_objects; ++o) {
      labels.push_back({token(kVerbs, v, "verb"), token(kObjects, o, "object"), 0});
    }
  }
  data.classes = ClassList(std::move(labels));

  std::vector<std::vector<double>> verb_dirs, object_dirs;
  for (std::size_t v = 0; v < config.num_verbs; ++v) verb_dirs.push_back(unit_gaussian(rng, dim));
  for (std::size_t o = 0; o < config.num_objects; ++o) {
    object_dirs.push_back(unit_gaussian(rng, dim));
  }
  data.prototypes = Matrix(num_classes, dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto unique = unit_gaussian(rng, dim);
    auto& vd = verb_dirs[c / config.num_objects];
    auto& od = object_dirs[c % config.num_objects];
    auto p = data.prototypes.row(c);
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = config.verb_weight * vd[d] + config.object_weight * od[d] +
             config.unique_weight * unique[d];
    }
    normalize(p);
  }
  auto shared = unit_gaussian(rng, dim);
  data.embeddings = round_to_float(noisy_copy(data.prototypes, rng, config.text_noise));

  std::vector<std::size_t> rank(num_classes);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  LabelSampler sampler{config.num_verbs, config.num_objects, std::vector<double>(num_classes)};
  for (std::size_t c = 0; c < num_classes; ++c) {
    sampler.freq[c] = std::pow(static_cast<double>(rank[c] + 1), -config.zipf_exponent);
  }

  sample_images(config, sampler, data.prototypes, shared, config.num_train, rng, data.features,
                data.labels);
  if (config.num_test > 0) {
    sample_images(config, sampler, data.prototypes, shared, config.num_test, rng,
                  data.test_features, data.test_labels);
  }
  return data;
}

SynthData make_separable(std::uint64_t seed, std::size_t num_train, std::size_t dim,
                         std::size_t num_classes, double noise_scale) {
  if (num_classes == 0 || dim == 0 || num_train < num_classes) {
    throw ConfigError("separable synth: need at least one image per class");
  }
  std::mt19937_64 rng(seed);
  SynthData data;
  std::vector<HoiLabel> labels;
  for (std::size_t c = 0; c < num_classes; ++c) {
    labels.push_back({token(kVerbs, c % kVerbs.size(), "verb"),
                      token(kObjects, c / kVerbs.size(), "object"), 0});
  }
  data.classes = ClassList(std::move(labels));
  data.prototypes = Matrix(num_classes, dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto u = unit_gaussian(rng, dim);
    std::copy(u.begin(), u.end(), data.prototypes.row(c).begin());
  }
  data.embeddings = round_to_float(noisy_copy(data.prototypes, rng, 0.5));

  auto fill = [&](std::size_t n, Matrix& features, LabelMatrix& out_labels) {
    features = Matrix(n, dim);
    out_labels = LabelMatrix(n, num_classes);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t c = r % num_classes;
      out_labels.set(r, c, true);
      auto e = noise(rng, dim, noise_scale);
      auto p = data.prototypes.row(c);
      auto x = features.row(r);
      for (std::size_t d = 0; d < dim; ++d) x[d] = p[d] + e[d];
    }
    features = round_to_float(features);
  };
  fill(num_train, data.features, data.labels);
  fill(num_train / 4, data.test_features, data.test_labels);
  return data;
}

void write_synth(const SynthData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  std::string classes = serialize_class_list(data.classes);
  write_file(path("classes.txt"),
             {reinterpret_cast<const std::uint8_t*>(classes.data()), classes.size()});
  std::string hash =
      sha256_hex({reinterpret_cast<const std::uint8_t*>(classes.data()), classes.size()});

  auto write = [&](const char* name, const Matrix& m, DType dtype, Role role) {
    write_matrix(m, dtype, path(name));
    write_sidecar(path(name), {role, hash, std::nullopt});
  };
  write("features.bin", data.features, DType::kFloat32, Role::kFeatures);
  write("labels.bin", to_matrix(data.labels), DType::kInt8, Role::kLabels);
  write("embeddings.bin", data.embeddings, DType::kFloat32, Role::kEmbeddings);
  if (data.test_features.rows() > 0) {
    write("test_features.bin", data.test_features, DType::kFloat32, Role::kFeatures);
    write("test_labels.bin", to_matrix(data.test_labels), DType::kInt8, Role::kLabels);
  }
}

}  // namespace defr
