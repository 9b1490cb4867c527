// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlsim/nn/tensor.hpp"

namespace hlsim::data {

/// Images (count, h, w, c) with pixel values in [0, 1] and one class index
/// per image.
template <typename T = float>
struct LabeledSet {
  nn::Tensor<T> images;
  std::vector<int> labels;
  int num_classes = 10;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::size_t sample_size() const { return images.size() / images.dim(0); }
  nn::Shape sample_shape() const { return nn::Shape(images.shape().begin() + 1, images.shape().end()); }

  std::span<const T> image(std::size_t i) const {
    return images.values().subspan(i * sample_size(), sample_size());
  }

  void validate() const {
    if (labels.empty()) return;
    if (images.rank() < 2 || images.dim(0) != labels.size()) {
      throw std::invalid_argument("labeled set: image count does not match label count");
    }
    for (int y : labels) {
      if (y < 0 || y >= num_classes) throw std::invalid_argument("labeled set: label out of range");
    }
  }

  /// Gathers the given rows (in order) into a new set.
  LabeledSet subset(std::span<const std::size_t> rows) const {
    if (rows.empty()) return LabeledSet{{}, {}, num_classes};
    const std::size_t n = sample_size();
    nn::Shape shape = images.shape();
    shape[0] = rows.size();
    std::vector<T> px;
    px.reserve(rows.size() * n);
    std::vector<int> ys;
    ys.reserve(rows.size());
    for (std::size_t r : rows) {
      auto img = image(r);
      px.insert(px.end(), img.begin(), img.end());
      ys.push_back(labels.at(r));
    }
    return LabeledSet{nn::Tensor<T>(std::move(shape), std::move(px)), std::move(ys), num_classes};
  }

  /// Appends another set with the same sample shape.
  static LabeledSet concat(std::span<const LabeledSet> parts) {
    LabeledSet out;
    std::vector<T> px;
    nn::Shape shape;
    for (const auto& p : parts) {
      if (p.empty()) continue;
      if (shape.empty()) {
        shape = p.images.shape();
        shape[0] = 0;
        out.num_classes = p.num_classes;
      }
      px.insert(px.end(), p.images.values().begin(), p.images.values().end());
      out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    }
    if (shape.empty()) return out;
    shape[0] = out.labels.size();
    out.images = nn::Tensor<T>(std::move(shape), std::move(px));
    return out;
  }
};

}  // namespace hlsim::data
