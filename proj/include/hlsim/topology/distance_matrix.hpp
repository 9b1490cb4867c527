// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/error.hpp"
#include "hlsim/rng.hpp"

namespace hlsim::topology {

/// Symmetric relative communication costs between nodes: zero diagonal,
/// off-diagonal entries in (0, beta].
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// Validates the invariants; throws std::invalid_argument on violation.
  DistanceMatrix(std::size_t n, double beta, std::vector<double> entries, std::uint64_t seed = 0)
      : n_(n), beta_(beta), seed_(seed), entries_(std::move(entries)) {
    validate();
  }

  std::size_t size() const noexcept { return n_; }
  double beta() const noexcept { return beta_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_.at(i * n_ + j); }
  std::span<const double> entries() const noexcept { return entries_; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

  void validate() const {
    if (n_ == 0) throw std::invalid_argument("distance matrix: no nodes");
    if (!(beta_ > 0.0)) throw std::invalid_argument("distance matrix: beta must be positive");
    if (entries_.size() != n_ * n_) throw std::invalid_argument("distance matrix: entry count is not N*N");
    for (std::size_t i = 0; i < n_; ++i) {
      if (entries_[i * n_ + i] != 0.0) {
        throw std::invalid_argument("distance matrix: diagonal entry " + std::to_string(i) + " is not zero");
      }
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double a = entries_[i * n_ + j];
        if (a != entries_[j * n_ + i]) {
          throw std::invalid_argument("distance matrix: asymmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        }
        if (!(a > 0.0 && a <= beta_)) {
          throw std::invalid_argument("distance matrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") outside (0, beta]");
        }
      }
    }
  }

 private:
  std::size_t n_ = 0;
  double beta_ = 0.1;
  std::uint64_t seed_ = 0;
  std::vector<double> entries_;
};

/// Upper triangle drawn row by row from (0, beta], mirrored; zero diagonal.
inline DistanceMatrix gen_distance_matrix(std::size_t n, double beta, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("distance matrix: need at least one node");
  if (!(beta > 0.0)) throw std::invalid_argument("distance matrix: beta must be positive");
  Rng rng(derive_seed(seed, "distance"));
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = beta * (1.0 - rng.uniform01());
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return DistanceMatrix(n, beta, std::move(d), seed);
}

/// Sum of hop costs along consecutive pairs of the visit sequence.
inline double path_cost(const DistanceMatrix& m, std::span<const std::size_t> visits) {
  for (std::size_t v : visits) {
    if (v >= m.size()) {
      throw std::out_of_range("path cost: node id " + std::to_string(v) + " not below N=" + std::to_string(m.size()));
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < visits.size(); ++k) total += m(visits[k], visits[k + 1]);
  return total;
}

/// N rows of N comma-separated reals, shortest round-trip formatting.
inline std::string to_csv(const DistanceMatrix& m) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
  return os.str();
}

/// Parses the CSV form and validates it. An entry-wise maximum is used as
/// beta unless one is supplied.
inline DistanceMatrix from_csv(const std::string& text, double beta = 0.0) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError(DataError::Kind::kBadShape, "distance csv: row " + std::to_string(rows + 1) +
                                                        ": not a number: '" + cell + "'");
      }
      ++c;
    }
    if (rows == 0) cols = c;
    if (c != cols) {
      throw DataError(DataError::Kind::kBadShape, "distance csv: row " + std::to_string(rows + 1) + " has " +
                                                      std::to_string(c) + " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0 || rows != cols) {
    throw DataError(DataError::Kind::kBadShape, "distance csv: expected a square matrix, got " +
                                                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (beta <= 0.0) {
    for (double v : values) beta = std::max(beta, v);
    if (beta <= 0.0) beta = 1.0;  // single node
  }
  try {
    return DistanceMatrix(rows, beta, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DataError(DataError::Kind::kBadShape, std::string("distance csv: ") + e.what());
  }
}

inline DistanceMatrix load_csv(const std::filesystem::path& path, double beta = 0.0) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str(), beta);
}

}  // namespace hlsim::topology
