// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlsim/nn/tensor.hpp"
#include "hlsim/rng.hpp"

namespace hlsim::nn {

enum class LayerKind { kConv2d, kMaxPool2, kRelu, kDense };

enum class OutputActivation { kSoftmax, kLinear };

/// One layer of a sequential network. `in` is the per-sample input shape:
/// (h, w, c) for spatial layers, (features) for dense layers.
struct LayerDesc {
  LayerKind kind;
  std::string id;
  Shape in;
  std::size_t kernel = 0;  // conv only
  std::size_t units = 0;   // conv filters or dense outputs

  Shape out() const {
    switch (kind) {
      case LayerKind::kConv2d:
        return {in[0] - kernel + 1, in[1] - kernel + 1, units};
      case LayerKind::kMaxPool2:
        return {in[0] / 2, in[1] / 2, in[2]};
      case LayerKind::kRelu:
        return in;
      case LayerKind::kDense:
        return {units};
    }
    return in;
  }

  std::size_t fan_in() const {
    return kind == LayerKind::kConv2d ? kernel * kernel * in[2] : shape_size(in);
  }

  std::size_t fan_out() const { return kind == LayerKind::kConv2d ? kernel * kernel * units : units; }

  bool has_params() const { return kind == LayerKind::kConv2d || kind == LayerKind::kDense; }

  /// Kernel block shape: (filters, k, k, c) for conv, (out, in) for dense.
  Shape weight_shape() const {
    if (kind == LayerKind::kConv2d) return {units, kernel, kernel, in[2]};
    return {units, shape_size(in)};
  }

  std::size_t param_count() const { return has_params() ? shape_size(weight_shape()) + units : 0; }
};

/// Sequential network description both model specs lower to.
struct Architecture {
  Shape input;
  std::vector<LayerDesc> layers;
  OutputActivation output = OutputActivation::kLinear;

  Shape output_shape() const { return layers.empty() ? input : layers.back().out(); }

  const Architecture& architecture() const { return *this; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.param_count();
    return n;
  }

  friend bool operator==(const Architecture& a, const Architecture& b) {
    if (a.input != b.input || a.output != b.output || a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
      const auto& x = a.layers[i];
      const auto& y = b.layers[i];
      if (x.kind != y.kind || x.in != y.in || x.kernel != y.kernel || x.units != y.units) return false;
    }
    return true;
  }
};

/// Two conv(5x5, stride 1) + ReLU + 2x2 max-pool stages, then a dense
/// softmax classifier. The MNIST configuration has 33580 parameters.
struct FoundationModelSpec {
  std::size_t input_height = 28;
  std::size_t input_width = 28;
  std::size_t input_channels = 1;
  std::size_t conv1_filters = 20;
  std::size_t conv2_filters = 50;
  std::size_t kernel = 5;
  std::size_t classes = 10;

  Architecture architecture() const {
    Architecture a;
    a.input = {input_height, input_width, input_channels};
    a.output = OutputActivation::kSoftmax;
    auto push = [&a](LayerKind kind, std::string id, std::size_t kernel, std::size_t units) {
      Shape in = a.layers.empty() ? a.input : a.layers.back().out();
      if (kind == LayerKind::kDense && in.size() != 1) in = {shape_size(in)};
      const std::size_t need = kind == LayerKind::kConv2d ? kernel : (kind == LayerKind::kMaxPool2 ? 2 : 1);
      if (in.size() == 3 && (in[0] < need || in[1] < need)) {
        throw std::invalid_argument("foundation spec: input too small for layer " + id);
      }
      a.layers.push_back(LayerDesc{kind, std::move(id), std::move(in), kernel, units});
    };
    push(LayerKind::kConv2d, "conv1", kernel, conv1_filters);
    push(LayerKind::kRelu, "relu1", 0, 0);
    push(LayerKind::kMaxPool2, "pool1", 0, 0);
    push(LayerKind::kConv2d, "conv2", kernel, conv2_filters);
    push(LayerKind::kRelu, "relu2", 0, 0);
    push(LayerKind::kMaxPool2, "pool2", 0, 0);
    push(LayerKind::kDense, "dense", 0, classes);
    return a;
  }
};

/// Q-network: input -> 500 ReLU -> 200 ReLU -> one linear output per node.
struct DqnModelSpec {
  std::size_t input_dim = 100;
  std::size_t hidden1 = 500;
  std::size_t hidden2 = 200;
  std::size_t outputs = 10;

  static DqnModelSpec for_nodes(std::size_t nodes) { return {nodes * nodes, 500, 200, nodes}; }

  Architecture architecture() const {
    if (input_dim == 0 || hidden1 == 0 || hidden2 == 0 || outputs == 0) {
      throw std::invalid_argument("dqn spec: all widths must be positive");
    }
    Architecture a;
    a.input = {input_dim};
    a.output = OutputActivation::kLinear;
    a.layers = {
        {LayerKind::kDense, "fc1", {input_dim}, 0, hidden1},
        {LayerKind::kRelu, "relu1", {hidden1}, 0, 0},
        {LayerKind::kDense, "fc2", {hidden1}, 0, hidden2},
        {LayerKind::kRelu, "relu2", {hidden2}, 0, 0},
        {LayerKind::kDense, "out", {hidden2}, 0, outputs},
    };
    return a;
  }
};

struct ParamBlock {
  std::string id;
  Shape shape;
  std::size_t offset = 0;

  std::size_t count() const { return shape_size(shape); }
  friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

inline std::vector<ParamBlock> param_layout(const Architecture& arch) {
  std::vector<ParamBlock> blocks;
  std::size_t offset = 0;
  for (const auto& l : arch.layers) {
    if (!l.has_params()) continue;
    blocks.push_back({l.id + ".weight", l.weight_shape(), offset});
    offset += blocks.back().count();
    blocks.push_back({l.id + ".bias", {l.units}, offset});
    offset += l.units;
  }
  return blocks;
}

/// Flat, ordered parameter vector plus the block layout that gives it meaning.
template <typename T>
struct ModelWeights {
  std::vector<ParamBlock> layout;
  std::vector<T> values;

  std::size_t size() const noexcept { return values.size(); }
  std::span<T> block(std::size_t i) { return std::span<T>(values).subspan(layout[i].offset, layout[i].count()); }
  std::span<const T> block(std::size_t i) const {
    return std::span<const T>(values).subspan(layout[i].offset, layout[i].count());
  }

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Splits a flat vector into one tensor per parameter block.
template <typename T>
std::vector<Tensor<T>> unflatten(const std::vector<ParamBlock>& layout, std::span<const T> flat) {
  std::size_t total = 0;
  for (const auto& b : layout) total += b.count();
  if (total != flat.size()) {
    throw std::invalid_argument("unflatten: vector of length " + std::to_string(flat.size()) +
                                " is not congruent with layout of " + std::to_string(total));
  }
  std::vector<Tensor<T>> out;
  out.reserve(layout.size());
  for (const auto& b : layout) {
    auto part = flat.subspan(b.offset, b.count());
    out.emplace_back(b.shape, std::vector<T>(part.begin(), part.end()));
  }
  return out;
}

template <typename T>
std::vector<T> flatten(const std::vector<Tensor<T>>& tensors) {
  std::vector<T> flat;
  for (const auto& t : tensors) flat.insert(flat.end(), t.values().begin(), t.values().end());
  return flat;
}

/// Glorot-uniform kernels, zero biases.
template <typename T>
ModelWeights<T> init_weights(const Architecture& arch, std::uint64_t seed) {
  ModelWeights<T> w;
  w.layout = param_layout(arch);
  w.values.assign(arch.param_count(), T{0});
  Rng rng(derive_seed(seed, "init"));
  std::size_t block = 0;
  for (const auto& l : arch.layers) {
    if (!l.has_params()) continue;
    const double limit = std::sqrt(6.0 / static_cast<double>(l.fan_in() + l.fan_out()));
    for (T& v : w.block(block)) v = static_cast<T>(rng.uniform(-limit, limit));
    block += 2;  // bias stays zero
  }
  return w;
}

template <typename T, typename Spec>
ModelWeights<T> init_weights(const Spec& spec, std::uint64_t seed) {
  return init_weights<T>(spec.architecture(), seed);
}

template <typename T>
ModelWeights<T> zero_weights(const Architecture& arch) {
  return ModelWeights<T>{param_layout(arch), std::vector<T>(arch.param_count(), T{0})};
}

}  // namespace hlsim::nn
