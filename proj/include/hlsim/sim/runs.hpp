// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/data/labeled_set.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/nn/train.hpp"
#include "hlsim/policy/agent.hpp"
#include "hlsim/rng.hpp"
#include "hlsim/sim/config.hpp"
#include "hlsim/sim/environment.hpp"
#include "hlsim/sim/episode.hpp"

namespace hlsim::sim {

struct PolicyRun {
  policy::QNetwork q;
  std::vector<EpisodeLog> logs;
  double final_epsilon = 0.0;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Trains the node-selection policy over `cfg.agent.episodes` episodes.
/// Epsilon decays once after every episode.
inline PolicyRun train_policy(const Environment& env, const SimConfig& cfg, std::uint64_t run_seed,
                              const EpisodeCallback& on_episode = {}) {
  cfg.validate();
  const auto& a = cfg.agent;
  PolicyRun run;
  run.q = policy::QNetwork::create(env.nodes(), derive_seed(run_seed, "dqn-init"), a.dqn_learning_rate);
  policy::ReplayMemory memory(a.replay_capacity, a.replay_min);
  RunStreams streams(run_seed);
  policy::EpsilonSchedule eps{a.epsilon_start, a.epsilon_decay};
  for (std::size_t e = 0; e < a.episodes; ++e) {
    run.logs.push_back(run_episode(env, cfg, run.q, memory, eps.epsilon, streams, e));
    if (on_episode) on_episode(run.logs.back());
    eps = policy::decay_epsilon(eps);
  }
  run.final_epsilon = eps.epsilon;
  return run;
}

/// Greedy rollout of a trained policy; no exploration and no updates.
inline EpisodeLog apply_policy(const Environment& env, const SimConfig& cfg, const policy::QNetwork& q,
                               std::uint64_t run_seed) {
  if (q.nodes() != env.nodes()) {
    throw std::invalid_argument("apply: checkpoint was trained for " + std::to_string(q.nodes()) +
                                " nodes, config has " + std::to_string(env.nodes()));
  }
  policy::QNetwork copy = q;  // rollout never writes to it, but keeps the API const
  RunStreams streams(run_seed);
  return run_rollout(env, cfg, ActionSource::kGreedy, {&copy, nullptr, 0.0}, streams, 0);
}

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_acc = 0.0;
  double val_loss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainingCurve {
  std::string method;
  std::vector<EpochRecord> epochs;
  bool reached_goal = false;
  bool early_stopped = false;
  std::size_t training_samples = 0;

  double final_accuracy() const { return epochs.empty() ? 0.0 : epochs.back().val_acc; }
  friend bool operator==(const TrainingCurve&, const TrainingCurve&) = default;
};

/// Epoch-wise training on one fixed dataset with one optimizer state,
/// evaluated after every epoch.
/// Stops at the goal, after `patience` epochs without a strict validation
/// loss improvement (when patience > 0), or at `max_epochs`.
inline TrainingCurve train_until(const Environment& env, const SimConfig& cfg, const data::LabeledSet<float>& dataset,
                                 std::size_t patience, std::size_t max_epochs, std::uint64_t run_seed) {
  const auto arch = env.foundation.architecture();
  auto weights = nn::init_weights<float>(arch, derive_seed(run_seed, "episode-init", 0));
  auto adam = nn::AdamState<float>::fresh(weights.size(), cfg.training.learning_rate);
  TrainingCurve curve;
  curve.training_samples = dataset.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t e = 0; e < max_epochs; ++e) {
    const auto stats =
        nn::train_epochs<float>(weights, arch, dataset, local_options(cfg, derive_seed(run_seed, "epoch", e)), adam);
    const auto eval = nn::evaluate<float>(weights, arch, env.validation);
    curve.epochs.push_back({e + 1, stats.mean_loss, eval.accuracy, eval.mean_loss});
    if (eval.accuracy >= cfg.agent.goal_acc) {
      curve.reached_goal = true;
      break;
    }
    if (eval.mean_loss < best) {
      best = eval.mean_loss;
      stale = 0;
    } else if (patience > 0 && ++stale >= patience) {
      curve.early_stopped = true;
      break;
    }
  }
  return curve;
}

/// The starter node trains alone on its shard.
inline TrainingCurve run_standalone(const Environment& env, const SimConfig& cfg, std::uint64_t run_seed) {
  auto c = train_until(env, cfg, env.shards.at(cfg.starter_node).data, cfg.training.standalone_patience,
                       cfg.training.standalone_max_epochs, run_seed);
  c.method = "standalone";
  return c;
}

/// All shards pooled and trained on together.
inline TrainingCurve run_centralized(const Environment& env, const SimConfig& cfg, std::uint64_t run_seed) {
  std::vector<data::LabeledSet<float>> parts;
  parts.reserve(env.nodes());
  for (const auto& s : env.shards) parts.push_back(s.data);
  const auto pooled = data::LabeledSet<float>::concat(parts);
  auto c = train_until(env, cfg, pooled, 0, cfg.training.centralized_max_epochs, run_seed);
  c.method = "centralized";
  return c;
}

/// Seed of the k-th repeated experiment.
inline std::uint64_t experiment_seed(std::uint64_t master, std::size_t k) { return derive_seed(master, "experiment", k); }

}  // namespace hlsim::sim
