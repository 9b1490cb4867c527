// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "hlsim/data/idx.hpp"
#include "hlsim/data/labeled_set.hpp"
#include "hlsim/data/partition.hpp"
#include "hlsim/data/synthetic.hpp"
#include "hlsim/error.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/rng.hpp"
#include "hlsim/sim/config.hpp"
#include "hlsim/topology/distance_matrix.hpp"

namespace hlsim::sim {

inline constexpr const char* kDataDirEnv = "HLSIM_DATA_DIR";

/// Relative dataset paths resolve against $HLSIM_DATA_DIR when it is set,
/// otherwise against `base`, then against `data/` under it.
inline std::filesystem::path resolve_data_path(const std::string& path, const std::filesystem::path& base = {}) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') return fs::path(dir) / p;
  const fs::path root = base.empty() ? fs::current_path() : base;
  if (fs::exists(root / p)) return root / p;
  return root / "data" / p;
}

/// Everything a rollout reads: data, shards and the topology.
struct Environment {
  nn::FoundationModelSpec foundation;
  data::LabeledSet<float> pool;
  data::LabeledSet<float> validation;
  std::vector<data::NodeShard<float>> shards;
  topology::DistanceMatrix distances;

  std::size_t nodes() const noexcept { return shards.size(); }
};

namespace detail {

inline data::LabeledSet<float> take_first(data::LabeledSet<float> set, std::size_t limit) {
  if (limit == 0 || limit >= set.size()) return set;
  std::vector<std::size_t> rows(limit);
  for (std::size_t i = 0; i < limit; ++i) rows[i] = i;
  return set.subset(rows);
}

}  // namespace detail

/// Loads (or generates) the pool and validation sets.
inline std::pair<data::LabeledSet<float>, data::LabeledSet<float>> load_datasets(const SimConfig& cfg,
                                                                                 const std::filesystem::path& base = {}) {
  const auto& d = cfg.data;
  data::LabeledSet<float> pool, val;
  if (d.source == DatasetSource::kSynthetic) {
    data::SyntheticOptions opt;
    opt.noise = d.synthetic_noise;
    pool = data::gen_synthetic<float>(d.classes, d.synthetic_train_per_class, derive_seed(cfg.seed, "pool"), opt);
    val = data::gen_synthetic<float>(d.classes, d.synthetic_val_per_class, derive_seed(cfg.seed, "validation"), opt);
  } else {
    pool = data::load_idx<float>(resolve_data_path(d.train_images, base), resolve_data_path(d.train_labels, base),
                                 d.classes);
    val = data::load_idx<float>(resolve_data_path(d.val_images, base), resolve_data_path(d.val_labels, base),
                                d.classes);
  }
  return {detail::take_first(std::move(pool), d.train_limit), detail::take_first(std::move(val), d.val_limit)};
}

inline nn::FoundationModelSpec foundation_for(const data::LabeledSet<float>& set, int classes) {
  nn::FoundationModelSpec spec;
  spec.input_height = set.images.dim(1);
  spec.input_width = set.images.dim(2);
  spec.input_channels = set.images.dim(3);
  spec.classes = static_cast<std::size_t>(classes);
  return spec;
}

inline data::PartitionSpec partition_spec(const SimConfig& cfg, std::size_t nodes, std::size_t per_node,
                                          bool disjoint) {
  data::PartitionSpec p;
  p.nodes = nodes;
  p.samples_per_node = per_node;
  p.alpha = cfg.alpha;
  p.classes = cfg.data.classes;
  p.seed = cfg.seed;
  p.disjoint = disjoint;
  return p;
}

inline topology::DistanceMatrix distances_for(const SimConfig& cfg, const std::filesystem::path& base = {}) {
  if (!cfg.distance_matrix.empty()) {
    std::filesystem::path p(cfg.distance_matrix);
    if (p.is_relative() && !base.empty()) p = base / p;
    auto m = topology::load_csv(p, cfg.beta);
    if (m.size() != cfg.nodes) {
      throw DataError(DataError::Kind::kBadShape, p.string() + ": matrix has " + std::to_string(m.size()) +
                                                      " nodes, config has " + std::to_string(cfg.nodes));
    }
    return m;
  }
  return topology::gen_distance_matrix(cfg.nodes, cfg.beta, cfg.distance_seed);
}

/// Builds the nominal environment; data problems surface here, before any
/// training starts.
inline Environment build_environment(const SimConfig& cfg, const std::filesystem::path& base = {}) {
  cfg.validate();
  Environment env;
  auto [pool, val] = load_datasets(cfg, base);
  pool.validate();
  val.validate();
  env.foundation = foundation_for(pool, cfg.data.classes);
  env.shards = data::partition_non_iid(pool, partition_spec(cfg, cfg.nodes, cfg.samples_per_node, cfg.data.disjoint));
  env.pool = std::move(pool);
  env.validation = std::move(val);
  env.distances = distances_for(cfg, base);
  return env;
}

}  // namespace hlsim::sim
