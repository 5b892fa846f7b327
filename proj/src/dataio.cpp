// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/dataio.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "json.hpp"

namespace defr {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'D', 'E', 'F', 'R'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

std::size_t element_size(DType dtype) { return dtype == DType::kFloat32 ? 4 : 1; }

}  // namespace

std::vector<std::uint8_t> encode_matrix(const Matrix& m, DType dtype) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + m.rows() * m.cols() * element_size(dtype));
  for (auto b : kMagic) out.push_back(b);
  out.push_back(kContainerVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(0);
  out.push_back(0);
  put_u64(out, m.rows());
  put_u64(out, m.cols());

  std::size_t index = 0;
  for (double v : m.data()) {
    if (dtype == DType::kFloat32) {
      float f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw NumericError("non-finite value at flat index " + std::to_string(index));
      }
      auto bits = std::bit_cast<std::uint32_t>(f);
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    } else {
      if (v != 1.0 && v != -1.0) {
        throw ConfigError("int8 container requires values in {+1,-1}; flat index " +
                          std::to_string(index));
      }
      out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(v)));
    }
    ++index;
  }
  return out;
}

LoadedMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("container shorter than header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("bad magic");
  }
  if (bytes[4] != kContainerVersion) {
    throw FormatError("unsupported container version " + std::to_string(bytes[4]));
  }
  if (bytes[5] > 1) throw FormatError("unknown dtype " + std::to_string(bytes[5]));
  if (bytes[6] != 0 || bytes[7] != 0) throw FormatError("reserved bytes must be zero");
  auto dtype = static_cast<DType>(bytes[5]);
  std::uint64_t rows = get_u64(bytes.subspan(8, 8));
  std::uint64_t cols = get_u64(bytes.subspan(16, 8));

  std::uint64_t esize = element_size(dtype);
  std::uint64_t available = bytes.size() - kHeaderSize;
  // Checked so that a hostile header cannot overflow the size computation.
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols / esize) {
    throw FormatError("declared shape overflows");
  }
  std::uint64_t expected = rows * cols * esize;
  if (available < expected) {
    throw FormatError("truncated payload: header declares " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " but only " + std::to_string(available) +
                      " payload bytes present");
  }
  if (available > expected) throw FormatError("trailing bytes after payload");

  Matrix m(rows, cols);
  auto payload = bytes.subspan(kHeaderSize, expected);
  auto out = m.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (dtype == DType::kFloat32) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(payload[4 * i + b]) << (8 * b);
      out[i] = std::bit_cast<float>(bits);
    } else {
      auto v = static_cast<std::int8_t>(payload[i]);
      if (v != 1 && v != -1) {
        throw FormatError("int8 value " + std::to_string(v) + " outside {+1,-1} at flat index " +
                          std::to_string(i));
      }
      out[i] = v;
    }
  }
  return {std::move(m), dtype};
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_matrix(const Matrix& m, DType dtype, const std::string& path) {
  write_file(path, encode_matrix(m, dtype));
}

LoadedMatrix read_matrix(const std::string& path) {
  try {
    return decode_matrix(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Matrix to_matrix(const LabelMatrix& labels) {
  Matrix m(labels.rows(), labels.cols());
  auto src = labels.data();
  auto dst = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return m;
}

LabelMatrix to_labels(const Matrix& m) {
  std::vector<std::int8_t> data;
  data.reserve(m.data().size());
  for (double v : m.data()) {
    if (v != 1.0 && v != -1.0) throw ConfigError("label values must be +1 or -1");
    data.push_back(static_cast<std::int8_t>(v));
  }
  return LabelMatrix(m.rows(), m.cols(), std::move(data));
}

void write_labels(const LabelMatrix& labels, const std::string& path) {
  write_matrix(to_matrix(labels), DType::kInt8, path);
}

Matrix read_features(const std::string& path) {
  auto loaded = read_matrix(path);
  if (loaded.dtype != DType::kFloat32) throw FormatError(path + ": features must be float32");
  const auto& m = loaded.values;
  if (m.rows() == 0 || m.cols() == 0) throw FormatError(path + ": empty feature matrix");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (norm(m.row(r)) == 0.0) {
      throw NumericError(path + ": feature row " + std::to_string(r) + " has zero norm");
    }
  }
  return std::move(loaded.values);
}

LabelMatrix read_labels(const std::string& path) {
  auto loaded = read_matrix(path);
  if (loaded.dtype != DType::kInt8) throw FormatError(path + ": labels must be int8");
  auto labels = to_labels(loaded.values);
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    auto row = labels.row(r);
    if (std::none_of(row.begin(), row.end(), [](std::int8_t v) { return v > 0; })) {
      throw ConfigError(path + ": label row " + std::to_string(r) + " has no positive class");
    }
  }
  return labels;
}

std::string to_string(Role role) {
  switch (role) {
    case Role::kFeatures: return "features";
    case Role::kLabels: return "labels";
    case Role::kEmbeddings: return "embeddings";
    case Role::kWeights: return "weights";
  }
  return "unknown";
}

Role role_from_string(const std::string& name) {
  if (name == "features") return Role::kFeatures;
  if (name == "labels") return Role::kLabels;
  if (name == "embeddings") return Role::kEmbeddings;
  if (name == "weights") return Role::kWeights;
  throw FormatError("unknown sidecar role '" + name + "'");
}

std::string sidecar_path(const std::string& container_path) {
  return container_path + ".meta.json";
}

void write_sidecar(const std::string& container_path, const Sidecar& meta) {
  nlohmann::ordered_json j;
  j["role"] = to_string(meta.role);
  j["classes_sha256"] = meta.classes_sha256;
  if (meta.gamma) j["gamma"] = *meta.gamma;
  std::string text = j.dump(2) + "\n";
  write_file(sidecar_path(container_path),
             {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::optional<Sidecar> read_sidecar(const std::string& container_path) {
  auto path = sidecar_path(container_path);
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto bytes = read_file(path);
  try {
    auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    Sidecar meta;
    meta.role = role_from_string(j.at("role").get<std::string>());
    meta.classes_sha256 = j.value("classes_sha256", std::string{});
    if (j.contains("gamma") && !j["gamma"].is_null()) meta.gamma = j["gamma"].get<double>();
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

}  // namespace defr
