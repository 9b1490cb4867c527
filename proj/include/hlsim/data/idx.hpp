// Copyright 2026 The hlsim Authors
// SPDX-License-Identifier: Apache-2.0

// IDX (MNIST) reader and writer. All header integers are big-endian.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "hlsim/data/labeled_set.hpp"
#include "hlsim/error.hpp"

namespace hlsim::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::kIo, "cannot open " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::uint32_t be32(std::span<const unsigned char> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

inline void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

inline void require_size(const std::vector<unsigned char>& bytes, std::size_t need, const std::string& what) {
  if (bytes.size() < need) {
    throw DataError(DataError::Kind::kTruncated, what + ": truncated file (" + std::to_string(bytes.size()) +
                                                     " bytes, expected " + std::to_string(need) + ")");
  }
}

}  // namespace detail

/// Decodes an IDX image/label file pair. Pixels are scaled from bytes to
/// [0, 1]; images come back as (count, rows, cols, 1).
template <typename T = float>
LabeledSet<T> load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                       int num_classes = 10) {
  const auto img = detail::read_file(images_path);
  const auto lab = detail::read_file(labels_path);
  const std::string iname = images_path.string();
  const std::string lname = labels_path.string();

  detail::require_size(img, 16, iname);
  if (const auto magic = detail::be32(img, 0); magic != kIdxImageMagic) {
    throw DataError(DataError::Kind::kWrongMagic,
                    iname + ": wrong magic " + std::to_string(magic) + " for an image file (expected 2051)");
  }
  detail::require_size(lab, 8, lname);
  if (const auto magic = detail::be32(lab, 0); magic != kIdxLabelMagic) {
    throw DataError(DataError::Kind::kWrongMagic,
                    lname + ": wrong magic " + std::to_string(magic) + " for a label file (expected 2049)");
  }
  const std::size_t count = detail::be32(img, 4);
  const std::size_t rows = detail::be32(img, 8);
  const std::size_t cols = detail::be32(img, 12);
  const std::size_t label_count = detail::be32(lab, 4);
  if (count != label_count) {
    throw DataError(DataError::Kind::kCountMismatch, iname + " holds " + std::to_string(count) + " images but " +
                                                         lname + " holds " + std::to_string(label_count) + " labels");
  }
  if (count == 0 || rows == 0 || cols == 0) {
    throw DataError(DataError::Kind::kBadShape, iname + ": empty image set");
  }
  detail::require_size(img, 16 + count * rows * cols, iname);
  detail::require_size(lab, 8 + count, lname);

  std::vector<T> px(count * rows * cols);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<T>(img[16 + i]) / T{255};
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    labels[i] = lab[8 + i];
    if (labels[i] >= num_classes) {
      throw DataError(DataError::Kind::kBadShape, lname + ": label " + std::to_string(labels[i]) + " at index " +
                                                      std::to_string(i) + " exceeds class count");
    }
  }
  return LabeledSet<T>{nn::Tensor<T>({count, rows, cols, 1}, std::move(px)), std::move(labels), num_classes};
}

/// Encodes a set back to an IDX pair; pixels are rounded to bytes.
template <typename T>
void write_idx(const LabeledSet<T>& set, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  std::vector<unsigned char> img;
  detail::put_be32(img, kIdxImageMagic);
  detail::put_be32(img, static_cast<std::uint32_t>(set.size()));
  detail::put_be32(img, static_cast<std::uint32_t>(set.images.dim(1)));
  detail::put_be32(img, static_cast<std::uint32_t>(set.images.dim(2)));
  for (T v : set.images.values()) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    img.push_back(static_cast<unsigned char>(std::lround(c * 255.0)));
  }
  std::vector<unsigned char> lab;
  detail::put_be32(lab, kIdxLabelMagic);
  detail::put_be32(lab, static_cast<std::uint32_t>(set.size()));
  for (int y : set.labels) lab.push_back(static_cast<unsigned char>(y));

  auto dump = [](const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError(DataError::Kind::kIo, "cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  };
  dump(images_path, img);
  dump(labels_path, lab);
}

}  // namespace hlsim::data
