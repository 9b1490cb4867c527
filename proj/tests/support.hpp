// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations shared by the test binaries.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hlsim/nn/model.hpp"
#include "hlsim/nn/network.hpp"
#include "hlsim/nn/tensor.hpp"

namespace hlsim::testing {

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

inline nn::Tensor<double> random_tensor(const nn::Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  return nn::Tensor<double>(shape, random_values(nn::shape_size(shape), seed, lo, hi));
}

/// Central differences of `f` at `x`, one coordinate at a time.
inline std::vector<double> numeric_gradient(std::vector<double> x, const std::function<double(const std::vector<double>&)>& f,
                                            double h = 1e-4) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Largest |a - n| / max(|a| + |n|, 1e-6) over all entries.
inline double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max(std::abs(analytic[i]) + std::abs(numeric[i]), 1e-6);
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

/// Sum of out * projection: a scalar whose gradient wrt the output is the
/// projection itself.
inline double projected_output(const nn::ModelWeights<double>& w, const nn::Architecture& arch,
                               const nn::Tensor<double>& x, const std::vector<double>& projection) {
  const auto out = nn::forward<double>(w, arch, x, false).first;
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * projection[i];
  return s;
}

/// Cyclic Jacobi eigenvalues of a small symmetric matrix (row-major n x n),
/// sorted in descending order.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Linear-interpolation percentile via an explicit sort.
inline double sorted_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double rank = q * static_cast<double>(v.size() - 1);
  const std::size_t below = static_cast<std::size_t>(rank);
  if (below + 1 >= v.size()) return v.back();
  const double frac = rank - static_cast<double>(below);
  return v[below] * (1.0 - frac) + v[below + 1] * frac;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hlsim_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace hlsim::testing
