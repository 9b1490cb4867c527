// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// Batched layer kernels over NHWC activations. Each forward has a matching
// backward that consumes what the forward saved.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hlsim/nn/model.hpp"

namespace hlsim::nn::kernels {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using ConstMapRow = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using MapRow = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;

inline Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Column sums, accumulated row by row; the result does not depend on buffer
// alignment.
template <typename T>
void column_sums(const ConstMapMat<T>& g, std::span<T> out) {
  MapRow<T> acc(out.data(), g.cols());
  acc.setZero();
  for (Eigen::Index r = 0; r < g.rows(); ++r) acc += g.row(r);
}

// Convolution, valid padding, stride 1. Kernel layout (f, ky, kx, c).

template <typename T>
void im2col(const LayerDesc& l, std::size_t batch, std::span<const T> in, std::vector<T>& cols) {
  const std::size_t h = l.in[0], w = l.in[1], c = l.in[2], k = l.kernel;
  const std::size_t oh = h - k + 1, ow = w - k + 1;
  const std::size_t row_len = k * k * c;
  cols.resize(batch * oh * ow * row_len);
  T* dst = cols.data();
  for (std::size_t n = 0; n < batch; ++n) {
    const T* img = in.data() + n * h * w * c;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t ky = 0; ky < k; ++ky) {
          const T* src = img + ((oy + ky) * w + ox) * c;
          dst = std::copy(src, src + k * c, dst);
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const LayerDesc& l, std::size_t batch, std::span<const T> dcols, std::span<T> dx) {
  const std::size_t h = l.in[0], w = l.in[1], c = l.in[2], k = l.kernel;
  const std::size_t oh = h - k + 1, ow = w - k + 1;
  std::fill(dx.begin(), dx.end(), T{0});
  const T* src = dcols.data();
  for (std::size_t n = 0; n < batch; ++n) {
    T* img = dx.data() + n * h * w * c;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t ky = 0; ky < k; ++ky) {
          T* dst = img + ((oy + ky) * w + ox) * c;
          for (std::size_t j = 0; j < k * c; ++j) dst[j] += src[j];
          src += k * c;
        }
      }
    }
  }
}

template <typename T>
void conv2d_forward(const LayerDesc& l, std::size_t batch, std::span<const T> in, std::span<const T> kernel,
                    std::span<const T> bias, std::vector<T>& cols, std::span<T> out) {
  im2col(l, batch, in, cols);
  const std::size_t row_len = l.kernel * l.kernel * l.in[2];
  const std::size_t rows = cols.size() / row_len;
  ConstMapMat<T> x(cols.data(), idx(rows), idx(row_len));
  ConstMapMat<T> wk(kernel.data(), idx(l.units), idx(row_len));
  MapMat<T> y(out.data(), idx(rows), idx(l.units));
  y.noalias() = x * wk.transpose();
  y.rowwise() += ConstMapRow<T>(bias.data(), idx(l.units));
}

/// `dx` may be empty when the input gradient is not needed (first layer).
template <typename T>
void conv2d_backward(const LayerDesc& l, std::size_t batch, std::span<const T> cols, std::span<const T> kernel,
                     std::span<const T> dy, std::span<T> dkernel, std::span<T> dbias, std::span<T> dx) {
  const std::size_t row_len = l.kernel * l.kernel * l.in[2];
  const std::size_t rows = cols.size() / row_len;
  ConstMapMat<T> x(cols.data(), idx(rows), idx(row_len));
  ConstMapMat<T> g(dy.data(), idx(rows), idx(l.units));
  MapMat<T>(dkernel.data(), idx(l.units), idx(row_len)).noalias() = g.transpose() * x;
  column_sums<T>(g, dbias);
  if (dx.empty()) return;
  ConstMapMat<T> wk(kernel.data(), idx(l.units), idx(row_len));
  std::vector<T> dcols(rows * row_len);
  MapMat<T>(dcols.data(), idx(rows), idx(row_len)).noalias() = g * wk;
  col2im_add<T>(l, batch, dcols, dx);
}

// 2x2 max-pool, stride 2. Ties go to the first element in scan order.

template <typename T>
void maxpool2_forward(const LayerDesc& l, std::size_t batch, std::span<const T> in, std::span<T> out,
                      std::vector<std::uint32_t>& argmax) {
  const std::size_t h = l.in[0], w = l.in[1], c = l.in[2];
  const std::size_t oh = h / 2, ow = w / 2;
  argmax.resize(batch * oh * ow * c);
  std::size_t o = 0;
  for (std::size_t n = 0; n < batch; ++n) {
    const std::size_t base = n * h * w * c;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t ch = 0; ch < c; ++ch, ++o) {
          std::size_t best = base + ((2 * oy) * w + 2 * ox) * c + ch;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              const std::size_t i = base + ((2 * oy + dy) * w + 2 * ox + dx) * c + ch;
              if (in[i] > in[best]) best = i;
            }
          }
          argmax[o] = static_cast<std::uint32_t>(best);
          out[o] = in[best];
        }
      }
    }
  }
}

template <typename T>
void maxpool2_backward(std::span<const std::uint32_t> argmax, std::span<const T> dy, std::span<T> dx) {
  std::fill(dx.begin(), dx.end(), T{0});
  for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += dy[o];
}

template <typename T>
void relu_forward(std::span<const T> in, std::span<T> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
}

/// Masks by the forward output; zero pre-activations pass no gradient.
template <typename T>
void relu_backward(std::span<const T> out, std::span<const T> dy, std::span<T> dx) {
  for (std::size_t i = 0; i < out.size(); ++i) dx[i] = out[i] > T{0} ? dy[i] : T{0};
}

template <typename T>
void dense_forward(const LayerDesc& l, std::size_t batch, std::span<const T> in, std::span<const T> kernel,
                   std::span<const T> bias, std::span<T> out) {
  const std::size_t fan_in = shape_size(l.in);
  ConstMapMat<T> x(in.data(), idx(batch), idx(fan_in));
  ConstMapMat<T> wk(kernel.data(), idx(l.units), idx(fan_in));
  MapMat<T> y(out.data(), idx(batch), idx(l.units));
  y.noalias() = x * wk.transpose();
  y.rowwise() += ConstMapRow<T>(bias.data(), idx(l.units));
}

template <typename T>
void dense_backward(const LayerDesc& l, std::size_t batch, std::span<const T> in, std::span<const T> kernel,
                    std::span<const T> dy, std::span<T> dkernel, std::span<T> dbias, std::span<T> dx) {
  const std::size_t fan_in = shape_size(l.in);
  ConstMapMat<T> x(in.data(), idx(batch), idx(fan_in));
  ConstMapMat<T> g(dy.data(), idx(batch), idx(l.units));
  MapMat<T>(dkernel.data(), idx(l.units), idx(fan_in)).noalias() = g.transpose() * x;
  column_sums<T>(g, dbias);
  if (dx.empty()) return;
  ConstMapMat<T> wk(kernel.data(), idx(l.units), idx(fan_in));
  MapMat<T>(dx.data(), idx(batch), idx(fan_in)).noalias() = g * wk;
}

/// Row-wise softmax; normalisation is accumulated in double.
template <typename T>
void softmax_rows(std::size_t rows, std::size_t cols, std::span<const T> logits, std::span<T> probs) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* z = logits.data() + r * cols;
    T* p = probs.data() + r * cols;
    const T zmax = *std::max_element(z, z + cols);
    double sum = 0.0;
    std::vector<double> e(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      e[j] = std::exp(static_cast<double>(z[j] - zmax));
      sum += e[j];
    }
    for (std::size_t j = 0; j < cols; ++j) p[j] = static_cast<T>(e[j] / sum);
  }
}

}  // namespace hlsim::nn::kernels
