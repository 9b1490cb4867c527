// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/state/pca.hpp"

namespace hlsim::state {

/// DQN input: one N-dimensional projection per node, ascending node id.
struct SystemState {
  std::vector<double> vector;

  std::size_t size() const noexcept { return vector.size(); }
  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Concatenates the projections of every node's weights. The current node's
/// slot uses `inner` (its freshly trained weights); every other slot uses
/// that node's resident weights.
template <typename T>
SystemState build_state(std::span<const T> inner, std::span<const std::span<const T>> residents,
                        std::size_t current_node, const PcaModel& pca) {
  const std::size_t n = residents.size();
  if (n == 0) throw std::invalid_argument("state: no resident models");
  if (current_node >= n) {
    throw std::invalid_argument("state: current node " + std::to_string(current_node) + " missing from " +
                                std::to_string(n) + " residents");
  }
  if (pca.k != n) {
    throw std::invalid_argument("state: PCA target dimension " + std::to_string(pca.k) + " differs from N=" +
                                std::to_string(n));
  }
  SystemState s;
  s.vector.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = project<T>(pca, j == current_node ? inner : residents[j]);
    s.vector.insert(s.vector.end(), p.begin(), p.end());
  }
  return s;
}

/// The slot vectors build_state reads: residents with the current node's
/// entry replaced by `inner`.
template <typename T>
std::vector<std::span<const T>> state_slots(std::span<const T> inner, std::span<const std::span<const T>> residents,
                                            std::size_t current_node) {
  std::vector<std::span<const T>> slots(residents.begin(), residents.end());
  if (current_node >= slots.size()) throw std::invalid_argument("state: current node out of range");
  slots[current_node] = inner;
  return slots;
}

/// Refits PCA (K = N) on the current slot vectors and builds the state.
template <typename T>
SystemState encode_state(std::span<const T> inner, std::span<const std::span<const T>> residents,
                         std::size_t current_node) {
  auto slots = state_slots<T>(inner, residents, current_node);
  const auto pca = fit_pca<T>(std::span<const std::span<const T>>(slots), slots.size());
  return build_state<T>(inner, residents, current_node, pca);
}

struct EmbeddingRow {
  std::size_t node_id = 0;
  int main_class = 0;
  double x = 0.0;
  double y = 0.0;
};

/// 2-D PCA coordinates of a set of models, for plotting.
template <typename T>
std::vector<EmbeddingRow> export_embedding(std::span<const std::span<const T>> models, std::span<const int> labels) {
  if (models.size() < 2) throw std::invalid_argument("embedding: need at least two models");
  if (labels.size() != models.size()) throw std::invalid_argument("embedding: one main class per model required");
  const auto pca = fit_pca<T>(models, 2);
  std::vector<EmbeddingRow> rows;
  rows.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto p = project<T>(pca, models[i]);
    rows.push_back({i, labels[i], p[0], p[1]});
  }
  return rows;
}

}  // namespace hlsim::state
