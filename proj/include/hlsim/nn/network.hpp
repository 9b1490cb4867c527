// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlsim/nn/layers.hpp"
#include "hlsim/nn/model.hpp"
#include "hlsim/nn/tensor.hpp"

namespace hlsim::nn {

/// Content hash of a parameter vector; lets backward reject a cache whose
/// weights have changed since the forward pass.
template <typename T>
std::uint64_t weights_fingerprint(std::span<const T> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  for (std::size_t i = 0; i < values.size() * sizeof(T); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Intermediates saved by forward() for backward().
template <typename T>
struct ForwardCache {
  struct Layer {
    std::vector<T> input;   // dense
    std::vector<T> cols;    // conv (im2col of the input)
    std::vector<T> output;  // relu
    std::vector<std::uint32_t> argmax;  // max-pool
  };

  Architecture arch;
  std::size_t batch = 0;
  std::uint64_t weights_hash = 0;
  std::vector<Layer> layers;

  bool valid() const noexcept { return batch > 0 && layers.size() == arch.layers.size(); }
};

namespace detail {

inline void check_weights(const Architecture& arch, const std::vector<ParamBlock>& layout, std::size_t n) {
  if (n != arch.param_count() || layout != param_layout(arch)) {
    throw std::invalid_argument("weights (" + std::to_string(n) +
                                " values) do not match the architecture's parameter layout (" +
                                std::to_string(arch.param_count()) + ")");
  }
}

}  // namespace detail

/// Runs the network on a batch whose shape is (b, input...). Returns the
/// per-sample outputs (softmax probabilities or linear values) as (b, out).
template <typename T>
std::pair<Tensor<T>, ForwardCache<T>> forward(const ModelWeights<T>& weights, const Architecture& arch,
                                              const Tensor<T>& batch, bool keep_cache = true) {
  detail::check_weights(arch, weights.layout, weights.size());
  Shape expected = arch.input;
  if (batch.rank() != expected.size() + 1 || !std::equal(expected.begin(), expected.end(), batch.shape().begin() + 1)) {
    throw std::invalid_argument("forward: batch shape " + shape_string(batch.shape()) +
                                " does not match model input " + shape_string(expected));
  }
  const std::size_t b = batch.dim(0);

  ForwardCache<T> cache;
  if (keep_cache) {
    cache.arch = arch;
    cache.batch = b;
    cache.weights_hash = weights_fingerprint<T>(weights.values);
    cache.layers.resize(arch.layers.size());
  }

  std::vector<T> act(batch.values().begin(), batch.values().end());
  std::vector<T> next;
  std::vector<T> scratch_cols;
  std::vector<std::uint32_t> scratch_argmax;
  std::size_t block = 0;
  for (std::size_t li = 0; li < arch.layers.size(); ++li) {
    const LayerDesc& l = arch.layers[li];
    next.assign(b * shape_size(l.out()), T{0});
    switch (l.kind) {
      case LayerKind::kConv2d: {
        auto& cols = keep_cache ? cache.layers[li].cols : scratch_cols;
        kernels::conv2d_forward<T>(l, b, act, weights.block(block), weights.block(block + 1), cols, next);
        block += 2;
        break;
      }
      case LayerKind::kDense: {
        kernels::dense_forward<T>(l, b, act, weights.block(block), weights.block(block + 1), next);
        block += 2;
        if (keep_cache) cache.layers[li].input = act;
        break;
      }
      case LayerKind::kMaxPool2: {
        auto& am = keep_cache ? cache.layers[li].argmax : scratch_argmax;
        kernels::maxpool2_forward<T>(l, b, act, next, am);
        break;
      }
      case LayerKind::kRelu:
        kernels::relu_forward<T>(act, next);
        if (keep_cache) cache.layers[li].output = next;
        break;
    }
    std::swap(act, next);
  }

  const std::size_t width = shape_size(arch.output_shape());
  Tensor<T> out({b, width});
  if (arch.output == OutputActivation::kSoftmax) {
    kernels::softmax_rows<T>(b, width, act, out.values());
  } else {
    std::copy(act.begin(), act.end(), out.data());
  }
  return {std::move(out), std::move(cache)};
}

template <typename T, typename Spec>
auto forward(const ModelWeights<T>& weights, const Spec& spec, const Tensor<T>& batch) {
  return forward<T>(weights, spec.architecture(), batch);
}

/// Parameter gradient given dL/d(pre-activation output), shape (b, out). For
/// softmax models that is the gradient with respect to the logits.
template <typename T>
std::vector<T> backward(const ModelWeights<T>& weights, const ForwardCache<T>& cache, const Tensor<T>& grad_out) {
  if (!cache.valid()) throw std::invalid_argument("backward: cache is empty or was not kept by forward");
  if (weights_fingerprint<T>(weights.values) != cache.weights_hash) {
    throw std::invalid_argument("backward: weights changed since the forward pass (stale cache)");
  }
  const Architecture& arch = cache.arch;
  detail::check_weights(arch, weights.layout, weights.size());
  const std::size_t b = cache.batch;
  const Shape want{b, shape_size(arch.output_shape())};
  if (grad_out.shape() != want) {
    throw std::invalid_argument("backward: upstream gradient shape " + shape_string(grad_out.shape()) +
                                " does not match cached output " + shape_string(want));
  }

  std::vector<T> grad(weights.size(), T{0});
  std::vector<T> dy(grad_out.values().begin(), grad_out.values().end());
  std::vector<T> dx;
  std::size_t block = weights.layout.size();
  for (std::size_t li = arch.layers.size(); li-- > 0;) {
    const LayerDesc& l = arch.layers[li];
    const auto& lc = cache.layers[li];
    const bool need_dx = li > 0;
    dx.assign(need_dx ? b * shape_size(l.in) : 0, T{0});
    switch (l.kind) {
      case LayerKind::kConv2d: {
        block -= 2;
        const auto& kb = weights.layout[block];
        const auto& bb = weights.layout[block + 1];
        kernels::conv2d_backward<T>(l, b, lc.cols, weights.block(block), dy,
                                    std::span<T>(grad).subspan(kb.offset, kb.count()),
                                    std::span<T>(grad).subspan(bb.offset, bb.count()), dx);
        break;
      }
      case LayerKind::kDense: {
        block -= 2;
        const auto& kb = weights.layout[block];
        const auto& bb = weights.layout[block + 1];
        kernels::dense_backward<T>(l, b, lc.input, weights.block(block), dy,
                                   std::span<T>(grad).subspan(kb.offset, kb.count()),
                                   std::span<T>(grad).subspan(bb.offset, bb.count()), dx);
        break;
      }
      case LayerKind::kMaxPool2:
        if (need_dx) kernels::maxpool2_backward<T>(lc.argmax, dy, dx);
        break;
      case LayerKind::kRelu:
        if (need_dx) kernels::relu_backward<T>(lc.output, dy, dx);
        break;
    }
    std::swap(dy, dx);
  }
  return grad;
}

}  // namespace hlsim::nn
