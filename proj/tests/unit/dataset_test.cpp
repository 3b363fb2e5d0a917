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

#include <cmath>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "kernelscope/dataset.hpp"

namespace ks = kernelscope;

namespace {

std::string cifar_record(unsigned char label, unsigned char r, unsigned char g, unsigned char b) {
  std::string rec(3073, '\0');
  rec[0] = static_cast<char>(label);
  for (std::size_t p = 0; p < 1024; ++p) {
    rec[1 + p] = static_cast<char>(r);
    rec[1 + 1024 + p] = static_cast<char>(g);
    rec[1 + 2048 + p] = static_cast<char>(b);
  }
  return rec;
}

TEST(Cifar10, DecodesPlanarRecordsToHwc) {
  std::string bytes = cifar_record(3, 255, 0, 51) + cifar_record(9, 0, 102, 255);
  bytes[1 + 5] = static_cast<char>(10);  // red plane, pixel (0, 5) of image 0
  const auto data = ks::decode_cifar10_batch(bytes);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data.labels[0], 3u);
  EXPECT_EQ(data.labels[1], 9u);
  EXPECT_EQ(data.images.shape(), (ks::Shape{2, 32, 32, 3}));
  const auto first = data.images.slice(0);
  EXPECT_FLOAT_EQ(first.at(0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(first.at(0, 0, 2), 0.2f);
  EXPECT_FLOAT_EQ(first.at(0, 5, 0), 10.0f / 255.0f);
  EXPECT_FLOAT_EQ(data.images.slice(1).at(31, 31, 1), 0.4f);
}

TEST(Cifar10, MaxRecordsAndLengthValidation) {
  const std::string bytes = cifar_record(1, 1, 2, 3) + cifar_record(2, 1, 2, 3) + cifar_record(3, 1, 2, 3);
  EXPECT_EQ(ks::decode_cifar10_batch(bytes, 2).size(), 2u);
  EXPECT_EQ(ks::decode_cifar10_batch(bytes, 0).size(), 3u);
  EXPECT_THROW((void)ks::decode_cifar10_batch(bytes.substr(0, 3072)), ks::ValidationError);
  EXPECT_THROW((void)ks::decode_cifar10_batch(bytes + "x"), ks::ValidationError);
  EXPECT_THROW((void)ks::decode_cifar10_batch(cifar_record(10, 0, 0, 0)), ks::ValidationError);
}

TEST(Cifar10, SaveLoadRoundTrip) {
  const auto data = ks::make_synthetic_dataset(4, 12, 32, 32, 10);
  const auto path = (std::filesystem::temp_directory_path() / "kernelscope_cifar_test.bin").string();
  ks::save_cifar10_batch(data, path);
  EXPECT_EQ(std::filesystem::file_size(path), 12u * 3073u);
  const auto back = ks::load_cifar10_batch(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.labels, data.labels);
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    ASSERT_NEAR(back.images[i], data.images[i], 0.5 / 255.0 + 1e-7);
  }
}

TEST(Synthetic, BalancedLabelsAndBoundedJitter) {
  const auto data = ks::make_synthetic_dataset(1, 50, 8, 8, 10);
  ks::validate_dataset(data);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(data.labels[i], i % 10);
    const auto mean = ks::synthetic_class_mean(data.labels[i], 10);
    const auto img = data.images.slice(i);
    for (std::size_t p = 0; p < 64; ++p) {
      for (std::size_t c = 0; c < 3; ++c) {
        const float v = img.values()[p * 3 + c];
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
        EXPECT_LE(std::abs(v - mean[c]), ks::kSyntheticJitter + 1e-6f);
      }
    }
  }
}

TEST(Synthetic, ClassMeansAreWellSeparated) {
  for (std::uint32_t k = 1; k <= 27; ++k) {
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = i + 1; j < k; ++j) {
        const auto a = ks::synthetic_class_mean(i, k), b = ks::synthetic_class_mean(j, k);
        float gap = 0.0f;
        for (int c = 0; c < 3; ++c) gap = std::max(gap, std::abs(a[c] - b[c]));
        EXPECT_GE(gap, 0.5f - 1e-6f);
      }
    }
  }
}

TEST(Dataset, ValidateRejectsInconsistentLabels) {
  auto data = ks::make_synthetic_dataset(1, 4, 2, 2, 2);
  data.labels.pop_back();
  EXPECT_THROW(ks::validate_dataset(data), ks::ValidationError);
  data = ks::make_synthetic_dataset(1, 4, 2, 2, 2);
  data.labels[0] = 7;
  EXPECT_THROW(ks::validate_dataset(data), ks::ValidationError);
}

// Independent bilinear oracle (half-pixel centres, clamped source coordinates).
double bilinear(const ks::Tensor& img, double sy, double sx, std::size_t c) {
  const double h = static_cast<double>(img.dim(0)), w = static_cast<double>(img.dim(1));
  sy = std::min(std::max(sy, 0.0), h - 1);
  sx = std::min(std::max(sx, 0.0), w - 1);
  const double y0 = std::floor(sy), x0 = std::floor(sx);
  const double y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
  const double fy = sy - y0, fx = sx - x0;
  auto px = [&](double y, double x) {
    return static_cast<double>(img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c));
  };
  return (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x1)) + fy * ((1 - fx) * px(y1, x0) + fx * px(y1, x1));
}

TEST(Resize, MatchesBilinearOracle) {
  ks::Xoshiro256pp rng(8);
  ks::Tensor img({20, 30, 3});
  for (float& v : img.values()) v = static_cast<float>(rng.uniform());
  const auto out = ks::resize_center_crop(img, 12, 10);
  ASSERT_EQ(out.shape(), (ks::Shape{10, 10, 3}));
  const std::size_t new_h = 12, new_w = 18;  // round(30 * 12 / 20)
  const std::size_t top = (new_h - 10) / 2, left = (new_w - 10) / 2;
  for (std::size_t y = 0; y < 10; ++y)
    for (std::size_t x = 0; x < 10; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const double sy = (top + y + 0.5) * 20.0 / new_h - 0.5;
        const double sx = (left + x + 0.5) * 30.0 / new_w - 0.5;
        EXPECT_NEAR(out.at(y, x, c), bilinear(img, sy, sx, c), 1e-6);
      }
}

TEST(Resize, IdentityAndConstantImages) {
  ks::Xoshiro256pp rng(2);
  ks::Tensor img({8, 8, 3});
  for (float& v : img.values()) v = static_cast<float>(rng.uniform());
  EXPECT_TRUE(ks::bit_equal(ks::resize_center_crop(img, 8, 8), img));
  ks::Tensor flat({17, 9, 3}, 0.3f);
  const auto resized = ks::resize_center_crop(flat, 5, 5);
  for (float v : resized.values()) EXPECT_EQ(v, 0.3f);
  EXPECT_THROW((void)ks::resize_center_crop(img, 4, 5), ks::ValidationError);
}

}  // namespace
