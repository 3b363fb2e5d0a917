/* Copyright 2026 The kernelscope Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/error.hpp"
#include "kernelscope/rng.hpp"
#include "kernelscope/tensor.hpp"

namespace kernelscope {

struct LabeledDataset {
  Tensor images;  // (n, h, w, 3), values in [0, 1]
  std::vector<std::uint32_t> labels;
  std::uint32_t class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

inline void validate_dataset(const LabeledDataset& data) {
  detail::require(data.class_count >= 1, "dataset class_count must be positive");
  detail::require(data.images.rank() == 4 && data.images.dim(3) == 3,
                  "dataset images must be (n, h, w, 3)");
  detail::require(data.images.dim(0) == data.labels.size(), "image/label count mismatch");
  for (auto label : data.labels) {
    detail::require(label < data.class_count, "label " + std::to_string(label) +
                                                  " >= class_count " +
                                                  std::to_string(data.class_count));
  }
  for (float v : data.images.values()) {
    detail::require(v >= 0.0f && v <= 1.0f, "dataset pixel outside [0, 1]");
  }
}

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecord = 1 + 3 * kCifarSide * kCifarSide;  // 3073

// CIFAR-10 binary batch: 3073-byte records, label byte then R, G, B planes of
// 32x32 row-major bytes. Pixels are divided by 255. `max_records` of 0 reads
// everything.
inline LabeledDataset decode_cifar10_batch(std::string_view bytes, std::size_t max_records = 0) {
  if (bytes.size() % kCifarRecord != 0) {
    detail::fail("CIFAR-10 batch length " + std::to_string(bytes.size()) +
                 " is not a multiple of 3073");
  }
  std::size_t n = bytes.size() / kCifarRecord;
  if (max_records != 0) n = std::min(n, max_records);
  detail::require(n > 0, "CIFAR-10 batch is empty");
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  LabeledDataset data;
  data.class_count = 10;
  data.labels.resize(n);
  std::vector<float> pixels(n * plane * 3);
  for (std::size_t r = 0; r < n; ++r) {
    const auto* record = reinterpret_cast<const unsigned char*>(bytes.data() + r * kCifarRecord);
    data.labels[r] = record[0];
    detail::require(record[0] < 10, "CIFAR-10 label byte out of range");
    float* out = pixels.data() + r * plane * 3;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < plane; ++p) {
        out[p * 3 + c] = static_cast<float>(record[1 + c * plane + p]) / 255.0f;
      }
    }
  }
  data.images = Tensor({n, kCifarSide, kCifarSide, 3}, std::move(pixels));
  return data;
}

inline LabeledDataset load_cifar10_batch(const std::string& path, std::size_t max_records = 0) {
  return decode_cifar10_batch(read_file(path), max_records);
}

// Writes 32x32 images in the CIFAR-10 binary layout, rounding to bytes.
inline void save_cifar10_batch(const LabeledDataset& data, const std::string& path) {
  detail::require(data.images.rank() == 4 && data.images.dim(1) == kCifarSide &&
                      data.images.dim(2) == kCifarSide && data.images.dim(3) == 3,
                  "CIFAR-10 batches hold (n, 32, 32, 3) images");
  detail::require(data.class_count <= 256, "CIFAR-10 labels are single bytes");
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  std::string bytes(data.size() * kCifarRecord, '\0');
  auto px = data.images.values();
  for (std::size_t r = 0; r < data.size(); ++r) {
    char* record = bytes.data() + r * kCifarRecord;
    record[0] = static_cast<char>(data.labels[r]);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < plane; ++p) {
        const float v = std::clamp(px[(r * plane + p) * 3 + c], 0.0f, 1.0f);
        record[1 + c * plane + p] = static_cast<char>(std::lround(v * 255.0f));
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Mean colour of class k in the synthetic dataset. Classes sit on a
// per-channel lattice with spacing 1/(levels-1); up to 27 classes the lattice
// has three levels {0, 0.5, 1}, so any two class means differ by >= 0.5 in at
// least one channel.
inline std::array<float, 3> synthetic_class_mean(std::uint32_t k, std::uint32_t class_count) {
  std::uint32_t levels = 3;
  while (levels * levels * levels < class_count) ++levels;
  const float step = 1.0f / static_cast<float>(levels - 1);
  return {static_cast<float>(k % levels) * step,
          static_cast<float>((k / levels) % levels) * step,
          static_cast<float>(k / (levels * levels)) * step};
}

inline constexpr float kSyntheticJitter = 0.1f;

// Balanced (label = i mod class_count) images whose pixels are the class mean
// colour plus uniform jitter in [-0.1, 0.1], clipped to [0, 1].
inline LabeledDataset make_synthetic_dataset(std::uint64_t seed, std::size_t n, std::size_t h,
                                             std::size_t w, std::uint32_t class_count) {
  detail::require(n >= 1, "synthetic dataset needs n >= 1");
  detail::require(class_count >= 1, "synthetic dataset needs class_count >= 1");
  detail::require(h >= 1 && w >= 1, "synthetic dataset needs positive image size");
  Xoshiro256pp rng(seed);
  LabeledDataset data;
  data.class_count = class_count;
  data.labels.resize(n);
  std::vector<float> pixels(n * h * w * 3);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint32_t>(i % class_count);
    data.labels[i] = label;
    const auto mean = synthetic_class_mean(label, class_count);
    float* img = pixels.data() + i * h * w * 3;
    for (std::size_t p = 0; p < h * w; ++p) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double jitter = (2.0 * rng.uniform() - 1.0) * kSyntheticJitter;
        img[p * 3 + c] = std::clamp(static_cast<float>(mean[c] + jitter), 0.0f, 1.0f);
      }
    }
  }
  data.images = Tensor({n, h, w, 3}, std::move(pixels));
  return data;
}

// Bilinear resize (half-pixel centres, edge clamp) so the shorter side equals
// `short_side`, then the central crop x crop window.
inline Tensor resize_center_crop(const Tensor& img, std::size_t short_side, std::size_t crop) {
  detail::require(img.rank() == 3 && img.dim(2) == 3, "resize_center_crop expects (h, w, 3)");
  detail::require(short_side >= 1 && crop >= 1, "short_side and crop must be >= 1");
  const std::size_t h = img.dim(0);
  const std::size_t w = img.dim(1);
  std::size_t new_h = short_side;
  std::size_t new_w = short_side;
  if (h < w) {
    new_w = static_cast<std::size_t>(std::lround(static_cast<double>(w) * short_side / h));
  } else if (w < h) {
    new_h = static_cast<std::size_t>(std::lround(static_cast<double>(h) * short_side / w));
  }
  detail::require(crop <= new_h && crop <= new_w,
                  "crop " + std::to_string(crop) + " larger than resized image " +
                      std::to_string(new_h) + "x" + std::to_string(new_w));

  const std::size_t top = (new_h - crop) / 2;
  const std::size_t left = (new_w - crop) / 2;
  const double scale_y = static_cast<double>(h) / static_cast<double>(new_h);
  const double scale_x = static_cast<double>(w) / static_cast<double>(new_w);

  auto source = [](std::size_t dst, double scale, std::size_t extent) {
    double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(extent - 1));
    const auto lo = static_cast<std::size_t>(std::floor(s));
    const std::size_t hi = std::min(lo + 1, extent - 1);
    return std::tuple{lo, hi, s - static_cast<double>(lo)};
  };

  Tensor out({crop, crop, 3});
  for (std::size_t y = 0; y < crop; ++y) {
    const auto [y0, y1, fy] = source(top + y, scale_y, h);
    for (std::size_t x = 0; x < crop; ++x) {
      const auto [x0, x1, fx] = source(left + x, scale_x, w);
      for (std::size_t c = 0; c < 3; ++c) {
        // v0 + f * (v1 - v0) keeps constant regions exact.
        const double a = img.at(y0, x0, c);
        const double b = img.at(y0, x1, c);
        const double d = img.at(y1, x0, c);
        const double e = img.at(y1, x1, c);
        const double top_row = a + fx * (b - a);
        const double bottom_row = d + fx * (e - d);
        out.at(y, x, c) = static_cast<float>(top_row + fy * (bottom_row - top_row));
      }
    }
  }
  return out;
}

}  // namespace kernelscope
