// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/nn/adam.hpp"
#include "hlsim/nn/loss.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/nn/network.hpp"
#include "hlsim/nn/train.hpp"
#include "hlsim/rng.hpp"
#include "hlsim/state/system_state.hpp"

namespace hlsim::policy {

enum class UpdateCadence { kPerStep, kPerEpisode };

struct AgentConfig {
  double discount = 0.9;         // future-reward discount, also used in the TD target
  std::size_t dqn_batch = 32;
  std::size_t dqn_epochs = 1;
  double dqn_learning_rate = 0.001;
  std::size_t episodes = 120;
  double goal_acc = 0.80;
  std::size_t max_steps = 35;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.02;
  double reward_base = 32.0;
  std::size_t replay_capacity = 50000;
  std::size_t replay_min = 128;
  UpdateCadence cadence = UpdateCadence::kPerStep;

  void validate() const {
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("agent: discount must lie in [0, 1)");
    if (!(goal_acc > 0.0 && goal_acc <= 1.0)) throw std::invalid_argument("agent: goal_acc must lie in (0, 1]");
    if (dqn_batch == 0) throw std::invalid_argument("agent: dqn_batch must be positive");
    if (dqn_epochs == 0) throw std::invalid_argument("agent: dqn_epochs must be positive");
    if (max_steps == 0) throw std::invalid_argument("agent: max_steps must be positive");
    if (replay_capacity == 0 || replay_min > replay_capacity) {
      throw std::invalid_argument("agent: need 0 < replay_min <= replay_capacity");
    }
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) throw std::invalid_argument("agent: epsilon_start in [0, 1]");
    if (!(epsilon_decay >= 0.0)) throw std::invalid_argument("agent: epsilon_decay must be non-negative");
    if (!(reward_base > 1.0)) throw std::invalid_argument("agent: reward_base must exceed 1");
  }
};

/// One replay record. `next_state` is absent exactly when `terminal`.
struct Transition {
  state::SystemState state;
  std::size_t action = 0;
  double reward = 0.0;
  std::optional<state::SystemState> next_state;
  bool terminal = true;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Bounded FIFO; the oldest record is evicted first.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 50000, std::size_t min_fill = 128)
      : capacity_(capacity), min_fill_(min_fill) {
    if (capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
  }

  void store(Transition t) {
    if (t.terminal != !t.next_state.has_value()) {
      throw std::invalid_argument("replay: terminal flag must be set exactly when next_state is absent");
    }
    buffer_.push_back(std::move(t));
    while (buffer_.size() > capacity_) buffer_.pop_front();
  }

  std::size_t size() const noexcept { return buffer_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t min_fill() const noexcept { return min_fill_; }
  bool ready() const noexcept { return buffer_.size() >= min_fill_; }
  const Transition& operator[](std::size_t i) const { return buffer_.at(i); }
  const Transition& front() const { return buffer_.front(); }
  const Transition& back() const { return buffer_.back(); }

 private:
  std::size_t capacity_;
  std::size_t min_fill_;
  std::deque<Transition> buffer_;
};

/// base^(val_acc - goal_acc) - distance - 1
inline double compute_reward(double val_acc, double goal_acc, double distance, double base = 32.0) {
  return std::pow(base, val_acc - goal_acc) - distance - 1.0;
}

/// sum_t discount^(t-1) r_t
inline double episode_return(std::span<const double> rewards, double discount) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= discount;
  }
  return total;
}

struct EpsilonSchedule {
  double epsilon = 1.0;
  double decay = 0.02;
};

/// Applied once per episode.
inline EpsilonSchedule decay_epsilon(EpsilonSchedule s) {
  s.epsilon *= std::exp(-s.decay);
  return s;
}

/// r + discount * max_a Q(s', a), or r alone for a terminal transition.
inline double td_target(double reward, double discount, std::optional<double> max_next_q) {
  return max_next_q ? reward + discount * *max_next_q : reward;
}

/// The shared node-selection policy: Q-network weights plus optimizer state.
struct QNetwork {
  nn::DqnModelSpec spec;
  nn::Architecture arch;
  nn::ModelWeights<double> weights;
  nn::AdamState<double> adam;

  static QNetwork create(std::size_t nodes, std::uint64_t seed, double learning_rate = 0.001) {
    QNetwork q;
    q.spec = nn::DqnModelSpec::for_nodes(nodes);
    q.arch = q.spec.architecture();
    q.weights = nn::init_weights<double>(q.arch, seed);
    q.adam = nn::AdamState<double>::fresh(q.weights.size(), learning_rate);
    return q;
  }

  std::size_t nodes() const noexcept { return spec.outputs; }

  /// Q-values of a batch of states, shape (b, N).
  nn::Tensor<double> q_values(std::span<const state::SystemState* const> states) const {
    return nn::forward<double>(weights, arch, stack(states), /*keep_cache=*/false).first;
  }

  std::vector<double> q_values(const state::SystemState& s) const {
    const state::SystemState* one[] = {&s};
    auto t = q_values(std::span<const state::SystemState* const>(one));
    return std::vector<double>(t.values().begin(), t.values().end());
  }

  nn::Tensor<double> stack(std::span<const state::SystemState* const> states) const {
    std::vector<double> x;
    x.reserve(states.size() * spec.input_dim);
    for (const auto* s : states) {
      if (s->size() != spec.input_dim) {
        throw std::invalid_argument("dqn: state of length " + std::to_string(s->size()) + ", network expects " +
                                    std::to_string(spec.input_dim));
      }
      x.insert(x.end(), s->vector.begin(), s->vector.end());
    }
    return nn::Tensor<double>({states.size(), spec.input_dim}, std::move(x));
  }
};

struct ActionChoice {
  std::size_t node = 0;
  bool greedy = false;
};

/// Epsilon-greedy: draw u in [0, 1); u > epsilon takes the Q-argmax (ties to
/// the lowest id), otherwise a uniformly random node, the current one
/// included.
inline ActionChoice select_action(const QNetwork& q, const state::SystemState& s, double epsilon, Rng& rng) {
  if (s.size() != q.spec.input_dim) {
    throw std::invalid_argument("select_action: state length " + std::to_string(s.size()) + " != " +
                                std::to_string(q.spec.input_dim));
  }
  const double u = rng.uniform01();
  if (u > epsilon) {
    const auto values = q.q_values(s);
    return {nn::argmax<double>(values), true};
  }
  return {static_cast<std::size_t>(rng.uniform_index(q.nodes())), false};
}

/// Same draws as the exploration branch of select_action with epsilon = 1.
inline std::size_t random_action(std::size_t nodes, Rng& rng) {
  (void)rng.uniform01();
  return static_cast<std::size_t>(rng.uniform_index(nodes));
}

/// Training targets for a batch: the current Q-vector with the taken
/// action's slot replaced by its TD target.
inline nn::Tensor<double> dqn_targets(const QNetwork& q, std::span<const Transition* const> batch,
                                      const nn::Tensor<double>& current_q, double discount) {
  nn::Tensor<double> targets = current_q;
  const std::size_t n = q.nodes();
  std::vector<const state::SystemState*> next;
  std::vector<std::size_t> next_rows;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!batch[i]->terminal) {
      next.push_back(&*batch[i]->next_state);
      next_rows.push_back(i);
    }
  }
  std::vector<std::optional<double>> max_next(batch.size());
  if (!next.empty()) {
    const auto qn = q.q_values(std::span<const state::SystemState* const>(next));
    for (std::size_t k = 0; k < next.size(); ++k) {
      const auto row = qn.row(k);
      max_next[next_rows[k]] = *std::max_element(row.begin(), row.end());
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i]->action >= n) throw std::invalid_argument("dqn: stored action out of range");
    targets[i * n + batch[i]->action] = td_target(batch[i]->reward, discount, max_next[i]);
  }
  return targets;
}

/// One Adam step on the MSE between Q(s) and its TD targets, over `batch`.
/// Returns the pre-update loss.
inline double train_on_batch(QNetwork& q, std::span<const Transition* const> batch, double discount) {
  std::vector<const state::SystemState*> states;
  states.reserve(batch.size());
  for (const auto* t : batch) states.push_back(&t->state);
  auto [pred, cache] = nn::forward<double>(q.weights, q.arch, q.stack(states));
  const auto targets = dqn_targets(q, batch, pred, discount);
  auto loss = nn::loss_mse<double>(pred, targets);
  const auto grad = nn::backward<double>(q.weights, cache, loss.grad);
  nn::adam_step<double>(q.weights.values, grad, q.adam);
  return loss.loss;
}

/// No-op below the replay minimum. Otherwise samples `dqn_batch` transitions
/// uniformly without replacement and runs `dqn_epochs` passes over them.
inline std::optional<double> train_dqn(QNetwork& q, const ReplayMemory& memory, const AgentConfig& cfg, Rng& rng) {
  if (!memory.ready()) return std::nullopt;
  const std::size_t b = std::min(cfg.dqn_batch, memory.size());
  std::vector<std::size_t> idx(memory.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<const Transition*> batch;
  batch.reserve(b);
  for (std::size_t i = 0; i < b; ++i) batch.push_back(&memory[idx[i]]);
  double loss = 0.0;
  for (std::size_t e = 0; e < std::max<std::size_t>(1, cfg.dqn_epochs); ++e) {
    loss = train_on_batch(q, std::span<const Transition* const>(batch), cfg.discount);
  }
  return loss;
}

}  // namespace hlsim::policy
