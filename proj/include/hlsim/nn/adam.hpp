// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlsim::nn {

template <typename T>
struct AdamState {
  std::uint64_t step_count = 0;
  std::vector<T> first_moment;
  std::vector<T> second_moment;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_hat = 1e-8;

  static AdamState fresh(std::size_t n, double learning_rate = 0.001) {
    AdamState s;
    s.first_moment.assign(n, T{0});
    s.second_moment.assign(n, T{0});
    s.learning_rate = learning_rate;
    return s;
  }

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update, in place. The gradient is checked for
/// non-finite entries before anything is modified.
template <typename T>
void adam_step(std::span<T> weights, std::span<const T> gradient, AdamState<T>& state) {
  if (gradient.size() != weights.size() || state.first_moment.size() != weights.size() ||
      state.second_moment.size() != weights.size()) {
    throw std::invalid_argument("adam: weights, gradient and moments must have equal length");
  }
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw std::invalid_argument("adam: non-finite gradient at index " + std::to_string(i) + " (" +
                                  std::to_string(static_cast<double>(gradient[i])) + ")");
    }
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const auto b1 = static_cast<T>(state.beta1);
  const auto b2 = static_cast<T>(state.beta2);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const T g = gradient[i];
    T& m = state.first_moment[i];
    T& v = state.second_moment[i];
    m = b1 * m + (T{1} - b1) * g;
    v = b2 * v + (T{1} - b2) * g * g;
    const double m_hat = static_cast<double>(m) / c1;
    const double v_hat = static_cast<double>(v) / c2;
    weights[i] -= static_cast<T>(state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon_hat));
  }
}

}  // namespace hlsim::nn
