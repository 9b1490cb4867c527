// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hlsim/data/labeled_set.hpp"
#include "hlsim/rng.hpp"

namespace hlsim::data {

inline constexpr std::size_t kSyntheticSide = 28;

namespace detail {

// Fixed per-class stroke pattern. It does not depend on the draw seed, so
// independent draws share class structure.
inline std::vector<double> class_template(int cls) {
  std::vector<double> img(kSyntheticSide * kSyntheticSide, 0.0);
  Rng rng(derive_seed(0x5eed'7e3a'11ULL, "synthetic-template", static_cast<std::uint64_t>(cls)));
  for (int stroke = 0; stroke < 3; ++stroke) {
    const double x0 = rng.uniform(6, 22), y0 = rng.uniform(6, 22);
    const double x1 = rng.uniform(6, 22), y1 = rng.uniform(6, 22);
    for (int s = 0; s <= 40; ++s) {
      const double t = s / 40.0;
      const double cx = x0 + t * (x1 - x0), cy = y0 + t * (y1 - y0);
      for (std::size_t y = 0; y < kSyntheticSide; ++y) {
        for (std::size_t x = 0; x < kSyntheticSide; ++x) {
          const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
          img[y * kSyntheticSide + x] = std::max(img[y * kSyntheticSide + x], std::exp(-d2 / 2.0));
        }
      }
    }
  }
  return img;
}

}  // namespace detail

struct SyntheticOptions {
  double noise = 0.35;   // std-dev of additive pixel noise
  int max_shift = 3;     // uniform integer translation in [-max_shift, max_shift]
};

/// Class-conditional 28x28 images: a fixed stroke pattern per class,
/// randomly shifted and dimmed, plus seeded Gaussian noise clamped to [0, 1].
/// Samples are emitted class by class, `per_class` each.
template <typename T = float>
LabeledSet<T> gen_synthetic(int classes, std::size_t per_class, std::uint64_t seed, SyntheticOptions opt = {}) {
  if (classes < 2) throw std::invalid_argument("synthetic: need at least two classes");
  if (per_class < 1) throw std::invalid_argument("synthetic: need at least one sample per class");
  constexpr std::size_t side = kSyntheticSide;
  const std::size_t count = static_cast<std::size_t>(classes) * per_class;
  std::vector<T> px(count * side * side);
  std::vector<int> labels(count);
  Rng rng(derive_seed(seed, "synthetic"));
  std::size_t n = 0;
  for (int c = 0; c < classes; ++c) {
    const auto tmpl = detail::class_template(c);
    for (std::size_t k = 0; k < per_class; ++k, ++n) {
      const auto span = static_cast<std::uint64_t>(2 * opt.max_shift + 1);
      const int dx = static_cast<int>(rng.uniform_index(span)) - opt.max_shift;
      const int dy = static_cast<int>(rng.uniform_index(span)) - opt.max_shift;
      const double gain = rng.uniform(0.5, 1.0);
      T* img = px.data() + n * side * side;
      for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
          const int sx = static_cast<int>(x) - dx, sy = static_cast<int>(y) - dy;
          double v = 0.0;
          if (sx >= 0 && sy >= 0 && sx < static_cast<int>(side) && sy < static_cast<int>(side)) {
            v = gain * tmpl[static_cast<std::size_t>(sy) * side + static_cast<std::size_t>(sx)];
          }
          v += opt.noise * rng.normal();
          img[y * side + x] = static_cast<T>(std::clamp(v, 0.0, 1.0));
        }
      }
      labels[n] = c;
    }
  }
  return LabeledSet<T>{nn::Tensor<T>({count, side, side, 1}, std::move(px)), std::move(labels), classes};
}

}  // namespace hlsim::data
