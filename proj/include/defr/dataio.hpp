// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Matrix container, little-endian, fixed layout:
//
//   offset  size  field
//   0       4     magic "DEFR"
//   4       1     version (1)
//   5       1     dtype (0 = float32, 1 = int8 in {+1, -1})
//   6       2     reserved (0)
//   8       8     rows (u64)
//   16      8     cols (u64)
//   24      ...   row-major payload
//
// Every container may have a `<file>.meta.json` sidecar naming its role.
// Concurrent writes to the same path are a caller error.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "defr/matrix.hpp"

namespace defr {

enum class DType : std::uint8_t { kFloat32 = 0, kInt8 = 1 };

inline constexpr std::size_t kHeaderSize = 24;
inline constexpr std::uint8_t kContainerVersion = 1;

struct LoadedMatrix {
  Matrix values;
  DType dtype = DType::kFloat32;
};

/// Serializes `m`. For kFloat32 every entry must be finite after rounding to
/// float; for kInt8 every entry must be exactly +1 or -1.
std::vector<std::uint8_t> encode_matrix(const Matrix& m, DType dtype);

/// Inverse of encode_matrix. Rejects bad magic, unknown version or dtype,
/// nonzero reserved bytes, and any length other than the declared one.
LoadedMatrix decode_matrix(std::span<const std::uint8_t> bytes);

void write_matrix(const Matrix& m, DType dtype, const std::string& path);
LoadedMatrix read_matrix(const std::string& path);

Matrix to_matrix(const LabelMatrix& labels);
LabelMatrix to_labels(const Matrix& m);

void write_labels(const LabelMatrix& labels, const std::string& path);

/// Feature file: float32, all finite, no zero rows.
Matrix read_features(const std::string& path);
/// Label file: int8, each row with at least one positive.
LabelMatrix read_labels(const std::string& path);

enum class Role { kFeatures, kLabels, kEmbeddings, kWeights };

std::string to_string(Role role);
Role role_from_string(const std::string& name);

struct Sidecar {
  Role role = Role::kFeatures;
  std::string classes_sha256;
  std::optional<double> gamma;
};

std::string sidecar_path(const std::string& container_path);
void write_sidecar(const std::string& container_path, const Sidecar& meta);
/// Empty when no sidecar file exists; throws FormatError when it is malformed.
std::optional<Sidecar> read_sidecar(const std::string& container_path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace defr
