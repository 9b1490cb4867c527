// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hlsim::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

/// Dense row-major tensor. Owns its storage.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)), values_(shape_size(shape_), T{0}) {
    check_extents();
  }

  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
    check_extents();
    if (values_.size() != shape_size(shape_)) {
      throw std::invalid_argument("tensor: " + std::to_string(values_.size()) +
                                  " values do not fill shape " + shape_string(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  std::vector<T>& storage() noexcept { return values_; }

  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Row i of a rank-2 tensor.
  std::span<const T> row(std::size_t i) const {
    const std::size_t cols = values_.size() / shape_.at(0);
    return std::span<const T>(values_).subspan(i * cols, cols);
  }

  bool all_finite() const {
    for (T v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  /// Same storage viewed under another shape of equal size.
  Tensor reshaped(Shape shape) const& { return Tensor(std::move(shape), values_); }
  Tensor reshaped(Shape shape) && { return Tensor(std::move(shape), std::move(values_)); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  void check_extents() const {
    for (std::size_t e : shape_) {
      if (e == 0) throw std::invalid_argument("tensor: zero extent in shape " + shape_string(shape_));
    }
  }

  Shape shape_;
  std::vector<T> values_;
};

}  // namespace hlsim::nn
