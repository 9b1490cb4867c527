// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "hlsim/data/partition.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/nn/train.hpp"
#include "hlsim/rng.hpp"
#include "hlsim/sim/compare.hpp"
#include "hlsim/sim/config.hpp"
#include "hlsim/sim/environment.hpp"
#include "hlsim/sim/episode.hpp"
#include "hlsim/sim/runs.hpp"
#include "hlsim/state/system_state.hpp"

namespace hlsim::sim {

struct ExperimentResult {
  std::vector<EpisodeLog> hl;      // every training episode
  std::vector<EpisodeLog> random;  // random-policy episodes at the same indices as the last HL episodes
};

/// One paired experiment: a full policy training run, and random-policy
/// rollouts with the episode indices of the last `cfg.last_episodes`
/// training episodes.
inline ExperimentResult run_experiment(const Environment& env, const SimConfig& cfg, std::size_t k) {
  const auto seed = experiment_seed(cfg.seed, k);
  ExperimentResult r;
  r.hl = train_policy(env, cfg, seed).logs;
  RunStreams streams(seed);
  const std::size_t episodes = cfg.agent.episodes;
  const std::size_t first = episodes > cfg.last_episodes ? episodes - cfg.last_episodes : 0;
  for (std::size_t e = first; e < episodes; ++e) r.random.push_back(run_baseline_random(env, cfg, streams, e));
  return r;
}

/// Runs `cfg.experiments` independent experiments on up to `cfg.jobs`
/// threads. Results are stored by experiment index, so the output does not
/// depend on scheduling.
inline std::vector<ExperimentResult> run_experiments(const Environment& env, const SimConfig& cfg,
                                                     const std::function<void(std::size_t)>& on_done = {}) {
  std::vector<ExperimentResult> results(cfg.experiments);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.experiments; k = next++) {
      try {
        results[k] = run_experiment(env, cfg, k);
        if (on_done) {
          std::lock_guard lock(mu);
          on_done(k);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = cfg.experiments;
      }
    }
  };
  const std::size_t threads = std::min(cfg.jobs, cfg.experiments);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

inline ComparisonSummary compare_experiments(std::span<const ExperimentResult> results, std::size_t last) {
  std::vector<std::vector<EpisodeLog>> hl, random;
  for (const auto& r : results) {
    hl.push_back(r.hl);
    random.push_back(r.random);
  }
  return compare(hl, random, last);
}

/// Models of `cfg.embed.nodes` nodes, each trained from one shared
/// initialization on its own non-IID shard, projected to 2-D.
inline std::vector<state::EmbeddingRow> run_embedding(const data::LabeledSet<float>& pool, const SimConfig& cfg) {
  const auto spec = foundation_for(pool, cfg.data.classes);
  const auto arch = spec.architecture();
  // Shards may overlap: the pool is too small for 100 disjoint shards.
  const auto shards = data::partition_non_iid(
      pool, partition_spec(cfg, cfg.embed.nodes, cfg.embed.samples_per_node, /*disjoint=*/false));
  const auto init = nn::init_weights<float>(arch, derive_seed(cfg.seed, "embed-init"));
  std::vector<nn::ModelWeights<float>> models;
  std::vector<int> labels;
  for (const auto& s : shards) {
    models.push_back(init);
    nn::TrainOptions opt;
    opt.epochs = cfg.embed.epochs;
    opt.batch_size = cfg.embed.batch_size;
    opt.learning_rate = cfg.training.learning_rate;
    opt.shuffle_seed = derive_seed(cfg.seed, "embed-node", s.node_id);
    nn::train_epochs<float>(models.back(), arch, s.data, opt);
    labels.push_back(s.main_class);
  }
  std::vector<std::span<const float>> views;
  for (const auto& m : models) views.emplace_back(m.values);
  return state::export_embedding<float>(std::span<const std::span<const float>>(views), labels);
}

struct ClusterDistances {
  double intra = 0.0;  // mean pairwise distance between points sharing a main class
  double inter = 0.0;  // mean pairwise distance between points of different classes
};

inline ClusterDistances cluster_distances(std::span<const state::EmbeddingRow> rows) {
  double intra = 0.0, inter = 0.0;
  std::size_t ni = 0, no = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const double d = std::hypot(rows[i].x - rows[j].x, rows[i].y - rows[j].y);
      if (rows[i].main_class == rows[j].main_class) {
        intra += d;
        ++ni;
      } else {
        inter += d;
        ++no;
      }
    }
  }
  return {ni ? intra / static_cast<double>(ni) : 0.0, no ? inter / static_cast<double>(no) : 0.0};
}

}  // namespace hlsim::sim
