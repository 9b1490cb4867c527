// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/nn/model.hpp"
#include "hlsim/nn/train.hpp"
#include "hlsim/policy/agent.hpp"
#include "hlsim/rng.hpp"
#include "hlsim/sim/config.hpp"
#include "hlsim/sim/environment.hpp"
#include "hlsim/state/system_state.hpp"
#include "hlsim/topology/distance_matrix.hpp"

namespace hlsim::sim {

struct RoundRecord {
  std::size_t step = 0;
  std::size_t node = 0;       // node that trained this round
  std::size_t next_node = 0;  // node selected to train next
  double val_acc = 0.0;
  double val_loss = 0.0;
  double reward = 0.0;
  double distance = 0.0;      // d(node, next_node)
  bool greedy = false;        // action came from the Q-argmax

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct EpisodeLog {
  std::size_t episode = 0;
  std::vector<RoundRecord> rounds;
  std::vector<std::size_t> visits;  // starter first, then every selected node
  double episode_return = 0.0;
  std::size_t total_rounds = 0;
  double total_comm_cost = 0.0;
  bool reached_goal = false;
  double epsilon = 0.0;
  std::optional<double> dqn_loss;  // last DQN loss, when the network trained

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

enum class ActionSource { kEpsilonGreedy, kGreedy, kRandom };

/// Per-experiment random streams. Episode-level seeds are derived from
/// `seed` and the episode index, so a random-policy rollout and a learning
/// rollout with the same index see the same initial weights and shuffles.
struct RunStreams {
  std::uint64_t seed = 0;
  Rng explore;
  Rng replay;

  explicit RunStreams(std::uint64_t s)
      : seed(s), explore(derive_seed(s, "explore")), replay(derive_seed(s, "replay")) {}

  std::uint64_t init_seed(std::size_t episode) const { return derive_seed(seed, "episode-init", episode); }
  std::uint64_t resident_seed(std::size_t episode, std::size_t node) const {
    return derive_seed(derive_seed(seed, "resident", episode), "node", node);
  }
  std::uint64_t round_seed(std::size_t episode, std::size_t step) const {
    return derive_seed(derive_seed(seed, "round", episode), "step", step);
  }
};

inline nn::TrainOptions local_options(const SimConfig& cfg, std::uint64_t shuffle_seed) {
  nn::TrainOptions opt;
  opt.epochs = cfg.training.epochs;
  opt.batch_size = cfg.training.batch_size;
  opt.learning_rate = cfg.training.learning_rate;
  opt.shuffle_seed = shuffle_seed;
  return opt;
}

/// Each node's own copy of `init`, trained on its shard alone.
inline std::vector<nn::ModelWeights<float>> build_residents(const Environment& env, const SimConfig& cfg,
                                                           const nn::ModelWeights<float>& init,
                                                           const RunStreams& streams, std::size_t episode) {
  const auto arch = env.foundation.architecture();
  std::vector<nn::ModelWeights<float>> residents;
  residents.reserve(env.nodes());
  for (std::size_t j = 0; j < env.nodes(); ++j) {
    residents.push_back(init);
    nn::train_epochs<float>(residents.back(), arch, env.shards[j].data,
                            local_options(cfg, streams.resident_seed(episode, j)));
  }
  return residents;
}

/// Hooks a rollout needs from the agent. `q` is required unless the action
/// source is kRandom; `memory` only for kEpsilonGreedy.
struct AgentHandle {
  policy::QNetwork* q = nullptr;
  policy::ReplayMemory* memory = nullptr;
  double epsilon = 0.0;
};

/// One decentralized training episode: the circulating model trains at the
/// current node, is evaluated, and hops to the next node until the goal
/// accuracy or the step cap is reached.
inline EpisodeLog run_rollout(const Environment& env, const SimConfig& cfg, ActionSource source, AgentHandle agent,
                              RunStreams& streams, std::size_t episode) {
  const std::size_t n = env.nodes();
  const auto& acfg = cfg.agent;
  if (cfg.starter_node >= n) throw std::invalid_argument("rollout: starter node outside the topology");
  if (env.distances.size() != n) throw std::invalid_argument("rollout: distance matrix does not match node count");
  if (source != ActionSource::kRandom) {
    if (agent.q == nullptr) throw std::invalid_argument("rollout: a policy network is required");
    if (agent.q->nodes() != n) {
      throw std::invalid_argument("rollout: policy trained for " + std::to_string(agent.q->nodes()) +
                                  " nodes, environment has " + std::to_string(n));
    }
  }
  if (source == ActionSource::kEpsilonGreedy && agent.memory == nullptr) {
    throw std::invalid_argument("rollout: training requires a replay memory");
  }

  const auto arch = env.foundation.architecture();
  auto weights = nn::init_weights<float>(arch, streams.init_seed(episode));
  std::vector<nn::ModelWeights<float>> residents;
  std::vector<std::span<const float>> resident_views;
  if (source != ActionSource::kRandom) {
    residents = build_residents(env, cfg, weights, streams, episode);
    for (const auto& r : residents) resident_views.emplace_back(r.values);
  }

  EpisodeLog log;
  log.episode = episode;
  log.epsilon = source == ActionSource::kEpsilonGreedy ? agent.epsilon : (source == ActionSource::kRandom ? 1.0 : 0.0);
  std::size_t node = cfg.starter_node;
  log.visits.push_back(node);

  struct Pending {
    state::SystemState state;
    std::size_t action;
    double reward;
  };
  std::optional<Pending> pending;
  auto learn = [&] {
    if (acfg.cadence != policy::UpdateCadence::kPerStep) return;
    if (auto loss = policy::train_dqn(*agent.q, *agent.memory, acfg, streams.replay)) log.dqn_loss = loss;
  };

  std::vector<double> rewards;
  for (std::size_t t = 0; t < acfg.max_steps; ++t) {
    try {
      nn::train_epochs<float>(weights, arch, env.shards[node].data, local_options(cfg, streams.round_seed(episode, t)));
      const auto eval = nn::evaluate<float>(weights, arch, env.validation);

      std::optional<state::SystemState> s;
      if (source != ActionSource::kRandom) {
        s = state::encode_state<float>(std::span<const float>(weights.values),
                                       std::span<const std::span<const float>>(resident_views), node);
      }
      if (pending) {
        agent.memory->store({std::move(pending->state), pending->action, pending->reward, *s, false});
        pending.reset();
        learn();
      }

      policy::ActionChoice choice;
      switch (source) {
        case ActionSource::kEpsilonGreedy:
          choice = policy::select_action(*agent.q, *s, agent.epsilon, streams.explore);
          break;
        case ActionSource::kGreedy:
          choice = {nn::argmax<double>(agent.q->q_values(*s)), true};
          break;
        case ActionSource::kRandom:
          choice = {policy::random_action(n, streams.explore), false};
          break;
      }

      const double d = env.distances(node, choice.node);
      const double r = policy::compute_reward(eval.accuracy, acfg.goal_acc, d, acfg.reward_base);
      rewards.push_back(r);
      log.rounds.push_back({t, node, choice.node, eval.accuracy, eval.mean_loss, r, d, choice.greedy});
      log.visits.push_back(choice.node);

      const bool done = eval.accuracy >= acfg.goal_acc || t + 1 == acfg.max_steps;
      if (source == ActionSource::kEpsilonGreedy) {
        if (done) {
          agent.memory->store({std::move(*s), choice.node, r, std::nullopt, true});
          learn();
        } else {
          pending = Pending{std::move(*s), choice.node, r};
        }
      }
      if (done) {
        log.reached_goal = eval.accuracy >= acfg.goal_acc;
        break;
      }
      node = choice.node;
    } catch (const std::exception& e) {
      throw std::runtime_error("episode " + std::to_string(episode) + ", step " + std::to_string(t) + " at node " +
                               std::to_string(node) + ": " + e.what());
    }
  }

  if (source == ActionSource::kEpsilonGreedy && acfg.cadence == policy::UpdateCadence::kPerEpisode) {
    if (auto loss = policy::train_dqn(*agent.q, *agent.memory, acfg, streams.replay)) log.dqn_loss = loss;
  }

  log.total_rounds = log.rounds.size();
  log.episode_return = policy::episode_return(rewards, acfg.discount);
  log.total_comm_cost = topology::path_cost(env.distances, log.visits);
  return log;
}

/// Learning rollout: epsilon-greedy actions, replay storage and DQN updates.
inline EpisodeLog run_episode(const Environment& env, const SimConfig& cfg, policy::QNetwork& q,
                              policy::ReplayMemory& memory, double epsilon, RunStreams& streams, std::size_t episode) {
  return run_rollout(env, cfg, ActionSource::kEpsilonGreedy, {&q, &memory, epsilon}, streams, episode);
}

/// Same loop with the next node drawn uniformly at random and no agent.
inline EpisodeLog run_baseline_random(const Environment& env, const SimConfig& cfg, RunStreams& streams,
                                      std::size_t episode = 0) {
  return run_rollout(env, cfg, ActionSource::kRandom, {}, streams, episode);
}

}  // namespace hlsim::sim
