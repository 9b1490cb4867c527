// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hlsim/policy/agent.hpp"

namespace hlsim::sim {

enum class DatasetSource { kMnist, kSynthetic };

struct DataConfig {
  DatasetSource source = DatasetSource::kMnist;
  std::string train_images = "mnist/train-images-idx3-ubyte";
  std::string train_labels = "mnist/train-labels-idx1-ubyte";
  std::string val_images = "mnist/val-images-idx3-ubyte";
  std::string val_labels = "mnist/val-labels-idx1-ubyte";
  int classes = 10;
  std::size_t train_limit = 0;  // 0 keeps every pool sample
  std::size_t val_limit = 0;    // 0 keeps every validation sample
  bool disjoint = true;
  std::size_t synthetic_train_per_class = 700;
  std::size_t synthetic_val_per_class = 300;
  double synthetic_noise = 0.35;
};

struct LocalTraining {
  std::size_t epochs = 1;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  std::size_t standalone_patience = 5;
  std::size_t standalone_max_epochs = 200;
  std::size_t centralized_max_epochs = 200;
};

struct EmbedConfig {
  std::size_t nodes = 100;
  std::size_t batch_size = 32;
  std::size_t epochs = 1;
  std::size_t samples_per_node = 500;
};

/// Everything a run needs. Defaults are the nominal 10-node MNIST scenario.
struct SimConfig {
  std::size_t nodes = 10;
  double alpha = 0.8;
  std::size_t samples_per_node = 500;
  std::size_t starter_node = 0;
  double beta = 0.1;
  std::uint64_t seed = 0;           // master seed
  std::uint64_t distance_seed = 0;  // distance matrix seed
  std::string distance_matrix;      // optional CSV overriding the generated matrix
  std::size_t experiments = 10;     // repeated runs for compare
  std::size_t last_episodes = 5;    // compare picks the best of these
  std::size_t jobs = 1;             // parallel experiments in compare

  DataConfig data;
  LocalTraining training;
  policy::AgentConfig agent;
  EmbedConfig embed;

  void validate() const {
    auto bad = [](const std::string& key, const std::string& why) {
      return std::invalid_argument(key + ": " + why);
    };
    if (nodes < 1) throw bad("nodes", "must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw bad("alpha", "must lie in [0, 1]");
    if (samples_per_node < 1) throw bad("samples_per_node", "must be at least 1");
    if (starter_node >= nodes) throw bad("starter_node", "must be below nodes");
    if (!(beta > 0.0)) throw bad("beta", "must be positive");
    if (experiments < 1) throw bad("experiments", "must be at least 1");
    if (last_episodes < 1) throw bad("last_episodes", "must be at least 1");
    if (jobs < 1) throw bad("jobs", "must be at least 1");
    if (data.classes < 2) throw bad("classes", "must be at least 2");
    if (data.synthetic_train_per_class < 1) throw bad("synthetic_train_per_class", "must be at least 1");
    if (data.synthetic_val_per_class < 1) throw bad("synthetic_val_per_class", "must be at least 1");
    if (!(data.synthetic_noise >= 0.0)) throw bad("synthetic_noise", "must be non-negative");
    if (training.epochs < 1) throw bad("local_epochs", "must be at least 1");
    if (training.batch_size < 1) throw bad("local_batch_size", "must be at least 1");
    if (!(training.learning_rate > 0.0)) throw bad("learning_rate", "must be positive");
    if (training.standalone_patience < 1) throw bad("standalone_patience", "must be at least 1");
    if (training.standalone_max_epochs < 1) throw bad("standalone_max_epochs", "must be at least 1");
    if (training.centralized_max_epochs < 1) throw bad("centralized_max_epochs", "must be at least 1");
    if (embed.nodes < 2) throw bad("embed_nodes", "must be at least 2");
    if (embed.batch_size < 1) throw bad("embed_batch_size", "must be at least 1");
    if (embed.epochs < 1) throw bad("embed_epochs", "must be at least 1");
    if (embed.samples_per_node < 1) throw bad("embed_samples_per_node", "must be at least 1");
    if (!(agent.dqn_learning_rate > 0.0)) throw bad("dqn_learning_rate", "must be positive");
    if (agent.episodes < 1) throw bad("episodes", "must be at least 1");
    if (!(agent.goal_acc >= 0.0 && agent.goal_acc <= 1.0)) throw bad("goal_acc", "must lie in [0, 1]");
    try {
      policy::AgentConfig a = agent;
      if (a.goal_acc == 0.0) a.goal_acc = 1.0;  // a zero goal is allowed for smoke runs
      a.validate();
    } catch (const std::invalid_argument& e) {
      throw bad("agent", e.what());
    }
  }
};

}  // namespace hlsim::sim
