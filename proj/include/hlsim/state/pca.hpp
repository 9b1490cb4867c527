// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlsim::state {

/// Mean-centred principal components of a small set of long vectors.
/// Components beyond the data rank are zero vectors.
struct PcaModel {
  std::vector<double> mean;
  std::vector<double> components;   // k rows of length dim(), row-major
  std::vector<double> eigenvalues;  // of the centred Gram matrix, non-increasing
  std::size_t k = 0;
  std::size_t rank = 0;             // non-zero components

  std::size_t dim() const noexcept { return mean.size(); }
  std::span<const double> component(std::size_t i) const {
    return std::span<const double>(components).subspan(i * dim(), dim());
  }
  bool rank_deficient() const noexcept { return rank < k; }
};

/// Fits through the n x n Gram matrix of the centred samples, which is cheap
/// when n is much smaller than the dimension. Each component's sign is fixed
/// so that its largest-magnitude entry is positive.
template <typename T>
PcaModel fit_pca(std::span<const std::span<const T>> samples, std::size_t k) {
  if (samples.empty()) throw std::invalid_argument("pca: no samples");
  const std::size_t n = samples.size();
  const std::size_t d = samples[0].size();
  if (d == 0) throw std::invalid_argument("pca: zero-length samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (samples[i].size() != d) {
      throw std::invalid_argument("pca: sample " + std::to_string(i) + " has length " +
                                  std::to_string(samples[i].size()) + ", expected " + std::to_string(d));
    }
  }
  if (k == 0 || k > n) {
    throw std::invalid_argument("pca: target dimension " + std::to_string(k) + " must lie in [1, " +
                                std::to_string(n) + "]");
  }

  PcaModel model;
  model.k = k;
  model.mean.assign(d, 0.0);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += static_cast<double>(s[j]);
  }
  for (double& m : model.mean) m /= static_cast<double>(n);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(samples[i][j]) - model.mean[j];
    }
  }
  const Eigen::MatrixXd gram = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double top = std::max(0.0, lambda(static_cast<Eigen::Index>(n - 1)));
  const double tol = std::max(top * 1e-10, 1e-300);
  model.components.assign(k * d, 0.0);
  model.eigenvalues.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = static_cast<Eigen::Index>(n - 1 - c);
    const double l = lambda(col);
    if (!(l > tol)) break;
    Eigen::VectorXd dir = x.transpose() * eig.eigenvectors().col(col);
    dir.normalize();
    Eigen::Index peak = 0;
    dir.cwiseAbs().maxCoeff(&peak);
    if (dir(peak) < 0) dir = -dir;
    std::copy(dir.data(), dir.data() + d, model.components.begin() + static_cast<std::ptrdiff_t>(c * d));
    model.eigenvalues[c] = l;
    ++model.rank;
  }
  return model;
}

template <typename T>
PcaModel fit_pca(const std::vector<std::vector<T>>& samples, std::size_t k) {
  std::vector<std::span<const T>> views(samples.begin(), samples.end());
  return fit_pca<T>(std::span<const std::span<const T>>(views), k);
}

/// components . (v - mean)
template <typename T>
std::vector<double> project(const PcaModel& pca, std::span<const T> v) {
  if (v.size() != pca.dim()) {
    throw std::invalid_argument("pca: projecting a vector of length " + std::to_string(v.size()) +
                                " with a model of dimension " + std::to_string(pca.dim()));
  }
  std::vector<double> out(pca.k, 0.0);
  for (std::size_t c = 0; c < pca.rank; ++c) {
    const auto comp = pca.component(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += comp[j] * (static_cast<double>(v[j]) - pca.mean[j]);
    out[c] = acc;
  }
  return out;
}

}  // namespace hlsim::state
