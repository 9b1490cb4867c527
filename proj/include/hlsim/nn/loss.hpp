// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "hlsim/nn/tensor.hpp"

namespace hlsim::nn {

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad;
};

/// Probabilities are clamped here before the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// Mean categorical cross-entropy of softmax outputs. The gradient is taken
/// with respect to the logits that produced `probs`: (p - onehot) / batch.
template <typename T>
LossResult<T> loss_cross_entropy(const Tensor<T>& probs, std::span<const int> labels) {
  if (probs.rank() != 2 || probs.dim(0) != labels.size()) {
    throw std::invalid_argument("cross-entropy: " + std::to_string(labels.size()) + " labels for probabilities " +
                                shape_string(probs.shape()));
  }
  const std::size_t b = probs.dim(0), c = probs.dim(1);
  const double tol = 1e-6 + static_cast<double>(c) * std::numeric_limits<T>::epsilon();
  LossResult<T> r{0.0, Tensor<T>(probs.shape())};
  for (std::size_t i = 0; i < b; ++i) {
    auto row = probs.row(i);
    double sum = 0.0;
    for (T p : row) sum += static_cast<double>(p);
    if (std::abs(sum - 1.0) > tol) {
      throw std::invalid_argument("cross-entropy: row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw std::invalid_argument("cross-entropy: label " + std::to_string(y) + " out of range");
    }
    r.loss -= std::log(std::max(static_cast<double>(row[static_cast<std::size_t>(y)]), kProbabilityFloor));
    for (std::size_t j = 0; j < c; ++j) {
      const double onehot = static_cast<std::size_t>(y) == j ? 1.0 : 0.0;
      r.grad[i * c + j] = static_cast<T>((static_cast<double>(row[j]) - onehot) / static_cast<double>(b));
    }
  }
  r.loss /= static_cast<double>(b);
  return r;
}

/// Mean squared error over every element; grad = 2 (pred - target) / count.
template <typename T>
LossResult<T> loss_mse(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw std::invalid_argument("mse: shape " + shape_string(pred.shape()) + " vs " + shape_string(target.shape()));
  }
  LossResult<T> r{0.0, Tensor<T>(pred.shape())};
  const auto n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    r.loss += d * d;
    r.grad[i] = static_cast<T>(2.0 * d / n);
  }
  r.loss /= n;
  return r;
}

}  // namespace hlsim::nn
