// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hlsim/data/labeled_set.hpp"
#include "hlsim/nn/adam.hpp"
#include "hlsim/nn/loss.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/nn/network.hpp"
#include "hlsim/rng.hpp"

namespace hlsim::nn {

struct TrainOptions {
  std::size_t epochs = 1;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  std::uint64_t shuffle_seed = 0;
};

struct TrainStats {
  std::uint64_t optimizer_steps = 0;
  double mean_loss = 0.0;  // over the last epoch's batches
};

/// Mini-batch Adam over `epochs` shuffled passes, in place, continuing from
/// `adam`. The final short batch is trained on.
template <typename T>
TrainStats train_epochs(ModelWeights<T>& weights, const Architecture& arch, const data::LabeledSet<T>& dataset,
                        const TrainOptions& opt, AdamState<T>& adam) {
  if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
  if (opt.batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
  if (adam.first_moment.size() != weights.size()) throw std::invalid_argument("train: optimizer state size mismatch");
  TrainStats stats;
  if (opt.epochs == 0) return stats;

  Rng rng(derive_seed(opt.shuffle_seed, "shuffle"));
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t e = 0; e < opt.epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      const std::size_t end = std::min(order.size(), start + opt.batch_size);
      auto batch = dataset.subset(std::span<const std::size_t>(order).subspan(start, end - start));
      auto [probs, cache] = forward<T>(weights, arch, batch.images);
      auto loss = loss_cross_entropy<T>(probs, batch.labels);
      auto grad = backward<T>(weights, cache, loss.grad);
      adam_step<T>(weights.values, grad, adam);
      loss_sum += loss.loss;
      ++batches;
      ++stats.optimizer_steps;
    }
    stats.mean_loss = loss_sum / static_cast<double>(batches);
  }
  return stats;
}

/// Same, with a fresh optimizer state for this call.
template <typename T>
TrainStats train_epochs(ModelWeights<T>& weights, const Architecture& arch, const data::LabeledSet<T>& dataset,
                        const TrainOptions& opt) {
  auto adam = AdamState<T>::fresh(weights.size(), opt.learning_rate);
  return train_epochs<T>(weights, arch, dataset, opt, adam);
}

template <typename T, typename Spec>
TrainStats train_epochs(ModelWeights<T>& weights, const Spec& spec, const data::LabeledSet<T>& dataset,
                        const TrainOptions& opt) {
  return train_epochs<T>(weights, spec.architecture(), dataset, opt);
}

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;
};

/// Index of the largest entry; ties go to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

template <typename T>
EvalResult evaluate(const ModelWeights<T>& weights, const Architecture& arch, const data::LabeledSet<T>& dataset,
                    std::size_t chunk = 64) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: dataset is empty");
  std::size_t correct = 0;
  double loss_sum = 0.0;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < dataset.size(); start += chunk) {
    const std::size_t end = std::min(dataset.size(), start + chunk);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), start);
    auto part = dataset.subset(rows);
    auto [probs, cache] = forward<T>(weights, arch, part.images, /*keep_cache=*/false);
    for (std::size_t i = 0; i < part.size(); ++i) {
      auto row = probs.row(i);
      const auto y = static_cast<std::size_t>(part.labels[i]);
      if (argmax<T>(row) == y) ++correct;
      loss_sum -= std::log(std::max(static_cast<double>(row[y]), kProbabilityFloor));
    }
  }
  const auto n = static_cast<double>(dataset.size());
  return {static_cast<double>(correct) / n, loss_sum / n};
}

template <typename T, typename Spec>
EvalResult evaluate(const ModelWeights<T>& weights, const Spec& spec, const data::LabeledSet<T>& dataset) {
  return evaluate<T>(weights, spec.architecture(), dataset);
}

}  // namespace hlsim::nn
