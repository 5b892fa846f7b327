// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace defr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad flags, inconsistent dimensions, malformed files.
/// The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ConfigError(line == 0 ? what
                              : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed or truncated binary container.
class FormatError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Shape disagreement between two inputs.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Non-finite values or degenerate geometry (zero-norm vectors). Exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace defr
