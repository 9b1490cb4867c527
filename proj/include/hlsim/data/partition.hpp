// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/data/labeled_set.hpp"
#include "hlsim/error.hpp"
#include "hlsim/rng.hpp"

namespace hlsim::data {

struct PartitionSpec {
  std::size_t nodes = 10;             // N
  std::size_t samples_per_node = 500; // m
  double alpha = 0.8;                 // heterogeneity level, main-class fraction
  int classes = 10;                   // C
  std::uint64_t seed = 0;
  bool disjoint = true;               // shards share no pool sample

  /// round(alpha * m), half away from zero.
  std::size_t main_count() const {
    return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(samples_per_node)));
  }

  void validate() const {
    if (nodes < 1) throw std::invalid_argument("partition: need at least one node");
    if (classes < 2) throw std::invalid_argument("partition: need at least two classes");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("partition: alpha must lie in [0, 1]");
    if (samples_per_node < 1) throw std::invalid_argument("partition: need at least one sample per node");
  }
};

/// Main class of node i: i itself when there are at least as many classes as
/// nodes, otherwise consecutive runs of N/C nodes share a class.
inline int main_class_for(std::size_t node, std::size_t nodes, int classes) {
  const auto c = static_cast<std::size_t>(classes);
  if (c >= nodes) return static_cast<int>(node);
  return static_cast<int>(std::min(c - 1, node * c / nodes));
}

template <typename T = float>
struct NodeShard {
  std::size_t node_id = 0;
  int main_class = 0;
  std::vector<std::size_t> indices;  // rows of the pool, in shard order
  LabeledSet<T> data;
};

/// Non-IID sharding: round(alpha*m) samples of the node's main class, the
/// rest drawn one at a time from a uniformly chosen other class. Sampling is
/// without replacement inside a node and, when `disjoint`, across nodes.
template <typename T>
std::vector<NodeShard<T>> partition_non_iid(const LabeledSet<T>& pool, const PartitionSpec& spec) {
  spec.validate();
  if (pool.num_classes != spec.classes) {
    throw std::invalid_argument("partition: pool has " + std::to_string(pool.num_classes) + " classes, spec says " +
                                std::to_string(spec.classes));
  }
  const auto classes = static_cast<std::size_t>(spec.classes);
  const std::size_t main_n = spec.main_count();
  const std::size_t sup_n = spec.samples_per_node - main_n;

  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < pool.size(); ++i) by_class[static_cast<std::size_t>(pool.labels[i])].push_back(i);

  Rng rng(derive_seed(spec.seed, "partition"));
  for (auto& rows : by_class) rng.shuffle(std::span<std::size_t>(rows));

  std::vector<NodeShard<T>> shards(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    shards[i].node_id = i;
    shards[i].main_class = main_class_for(i, spec.nodes, spec.classes);
  }

  // Up-front feasibility check on the main-class demand.
  std::vector<std::size_t> need(classes, 0);
  for (const auto& s : shards) need[static_cast<std::size_t>(s.main_class)] += spec.disjoint ? main_n : 0;
  if (!spec.disjoint) {
    for (const auto& s : shards) {
      auto& n = need[static_cast<std::size_t>(s.main_class)];
      n = std::max(n, main_n);
    }
  }
  std::ostringstream deficit;
  for (std::size_t c = 0; c < classes; ++c) {
    if (need[c] > by_class[c].size()) {
      deficit << " class " << c << ": need " << need[c] << ", have " << by_class[c].size() << ";";
    }
  }
  if (!deficit.str().empty()) {
    throw DataError(DataError::Kind::kInsufficientPool, "partition: pool too small for main classes:" + deficit.str());
  }

  // Disjoint mode hands out every class list front to back, main classes
  // first so supplemental draws cannot starve them. Otherwise each node draws
  // from its own copy of the class lists.
  std::vector<std::size_t> short_by(classes, 0);
  auto draw_supplemental = [&](NodeShard<T>& shard, std::vector<std::vector<std::size_t>>& lists,
                               std::vector<std::size_t>& cursor, bool shuffle_on_draw) {
    const auto main_cls = static_cast<std::size_t>(shard.main_class);
    for (std::size_t k = 0; k < sup_n; ++k) {
      auto cls = static_cast<std::size_t>(rng.uniform_index(classes - 1));
      if (cls >= main_cls) ++cls;
      auto& rows = lists[cls];
      if (cursor[cls] >= rows.size()) {
        ++short_by[cls];
        continue;
      }
      if (shuffle_on_draw) {
        const std::size_t j = cursor[cls] + static_cast<std::size_t>(rng.uniform_index(rows.size() - cursor[cls]));
        std::swap(rows[cursor[cls]], rows[j]);
      }
      shard.indices.push_back(rows[cursor[cls]++]);
    }
  };

  if (spec.disjoint) {
    std::vector<std::size_t> cursor(classes, 0);
    for (auto& shard : shards) {
      const auto cls = static_cast<std::size_t>(shard.main_class);
      for (std::size_t k = 0; k < main_n; ++k) shard.indices.push_back(by_class[cls][cursor[cls]++]);
    }
    for (auto& shard : shards) draw_supplemental(shard, by_class, cursor, false);
  } else {
    for (auto& shard : shards) {
      auto lists = by_class;
      std::vector<std::size_t> cursor(classes, 0);
      const auto cls = static_cast<std::size_t>(shard.main_class);
      rng.shuffle(std::span<std::size_t>(lists[cls]));
      for (std::size_t k = 0; k < main_n; ++k) shard.indices.push_back(lists[cls][cursor[cls]++]);
      draw_supplemental(shard, lists, cursor, true);
    }
  }

  std::ostringstream sup_deficit;
  for (std::size_t c = 0; c < classes; ++c) {
    if (short_by[c] > 0) sup_deficit << " class " << c << ": short by " << short_by[c] << ";";
  }
  if (!sup_deficit.str().empty()) {
    throw DataError(DataError::Kind::kInsufficientPool,
                    "partition: pool too small for supplemental draws:" + sup_deficit.str());
  }

  for (auto& s : shards) s.data = pool.subset(s.indices);
  return shards;
}

}  // namespace hlsim::data
