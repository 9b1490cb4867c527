// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hlsim {

/// Bad configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dataset files that are missing, truncated or malformed, or a pool that
/// cannot satisfy a partition request.
class DataError : public std::runtime_error {
 public:
  enum class Kind { kIo, kWrongMagic, kTruncated, kCountMismatch, kBadShape, kInsufficientPool };

  DataError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace hlsim
