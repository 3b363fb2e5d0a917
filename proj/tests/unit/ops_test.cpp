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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kernelscope/ops.hpp"
#include "../support/oracles.hpp"

namespace ks = kernelscope;

namespace {

ks::Tensor random_tensor(ks::Shape shape, std::mt19937_64& rng, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  ks::Tensor t(std::move(shape));
  for (float& v : t.values()) v = dist(rng);
  return t;
}

TEST(Conv2d, MatchesDirectOracleOn200RandomConfigs) {
  std::mt19937_64 rng(20240601);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = std::array<std::size_t, 4>{1, 3, 5, 7}[pick(0, 3)];
    const std::size_t stride = pick(1, 3);
    const bool same = pick(0, 1) == 1;
    const std::size_t h = pick(k, 14), w = pick(k, 14);
    const std::size_t c_in = pick(1, 6), c_out = pick(1, 6);
    const bool with_bias = pick(0, 1) == 1;
    const auto x = random_tensor({h, w, c_in}, rng);
    const auto kernel = random_tensor({k, k, c_in, c_out}, rng);
    const auto bias = random_tensor({c_out}, rng);
    const ks::Tensor* b = with_bias ? &bias : nullptr;
    const auto got = ks::ops::conv2d(x, kernel, b, stride, same ? ks::Padding::same : ks::Padding::valid);
    const auto want = ks::testing::conv_reference(x, kernel, b, stride, same);
    ASSERT_EQ(got.shape(), want.shape()) << "trial " << trial;
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_NEAR(got.values()[i], want.values()[i], 1e-5) << "trial " << trial << " index " << i;
    }
  }
}

TEST(Conv2d, HandComputedSame3x3) {
  // 3x3 single channel input 1..9, all-ones 3x3 kernel: each output is the sum
  // of the in-bounds neighbourhood.
  ks::Tensor x({3, 3, 1}, std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  ks::Tensor w({3, 3, 1, 1}, 1.0f);
  const auto y = ks::ops::conv2d(x, w, nullptr, 1, ks::Padding::same);
  const std::vector<float> expected{12, 21, 16, 27, 45, 33, 24, 39, 28};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_FLOAT_EQ(y.values()[i], expected[i]);
}

TEST(Conv2d, RejectsChannelMismatch) {
  EXPECT_THROW((void)ks::ops::conv2d(ks::Tensor({4, 4, 2}), ks::Tensor({3, 3, 3, 1}), nullptr, 1,
                                     ks::Padding::same),
               ks::ValidationError);
}

TEST(BatchNorm, MatchesFormula) {
  ks::Tensor x({2, 2}, std::vector<float>{1, 2, 3, 4});
  ks::Tensor gamma({2}, std::vector<float>{2, 0.5f});
  ks::Tensor beta({2}, std::vector<float>{0.1f, -1});
  ks::Tensor mean({2}, std::vector<float>{1, 1});
  ks::Tensor var({2}, std::vector<float>{4, 0});
  const auto y = ks::ops::batchnorm_inference(x, gamma, beta, mean, var, 1e-3);
  auto f = [](double xv, double g, double b, double m, double v) {
    return g * (xv - m) / std::sqrt(v + 1e-3) + b;
  };
  EXPECT_NEAR(y.values()[0], f(1, 2, 0.1f, 1, 4), 1e-6);
  EXPECT_NEAR(y.values()[1], f(2, 0.5, -1, 1, 0), 1e-5);
  EXPECT_NEAR(y.values()[2], f(3, 2, 0.1f, 1, 4), 1e-6);
  EXPECT_NEAR(y.values()[3], f(4, 0.5, -1, 1, 0), 1e-5);
  ks::Tensor negative({2}, -1.0f);
  EXPECT_THROW((void)ks::ops::batchnorm_inference(x, gamma, beta, mean, negative, 1e-3),
               ks::ValidationError);
}

TEST(Elementwise, ReluAddGap) {
  ks::Tensor x({2, 1, 2}, std::vector<float>{-1, 2, 3, -4});
  const auto r = ks::ops::relu(x);
  EXPECT_EQ(std::vector<float>(r.values().begin(), r.values().end()), (std::vector<float>{0, 2, 3, 0}));
  const auto s = ks::ops::add(x, x);
  EXPECT_EQ(s.values()[3], -8.0f);
  EXPECT_THROW((void)ks::ops::add(x, ks::Tensor({2, 2, 1})), ks::ValidationError);
  const auto g = ks::ops::global_avg_pool(x);
  EXPECT_EQ(g.shape(), (ks::Shape{2}));
  EXPECT_FLOAT_EQ(g.values()[0], 1.0f);
  EXPECT_FLOAT_EQ(g.values()[1], -1.0f);
}

TEST(Dense, MatchesMatrixProduct) {
  ks::Tensor x({2}, std::vector<float>{1, -2});
  ks::Tensor w({2, 3}, std::vector<float>{1, 2, 3, 4, 5, 6});
  ks::Tensor b({3}, std::vector<float>{0.5f, 0, -1});
  const auto y = ks::ops::dense(x, w, &b);
  EXPECT_FLOAT_EQ(y.values()[0], 1 - 8 + 0.5f);
  EXPECT_FLOAT_EQ(y.values()[1], 2 - 10);
  EXPECT_FLOAT_EQ(y.values()[2], 3 - 12 - 1);
}

TEST(Softmax, StableAndNormalised) {
  ks::Tensor logits({3}, std::vector<float>{1000, 1001, 999});
  const auto p = ks::ops::softmax(logits);
  double sum = 0;
  for (float v : p.values()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-6);
  const double e0 = std::exp(-1.0), e2 = std::exp(-2.0);
  EXPECT_NEAR(p.values()[1], 1.0 / (1 + e0 + e2), 1e-6);
}

TEST(MaxPool, IgnoresPaddingAndMatchesBruteForce) {
  std::mt19937_64 rng(9);
  const auto x = random_tensor({7, 7, 2}, rng, -3.0f, -1.0f);  // all negative
  const auto y = ks::ops::max_pool(x, 3, 2, ks::Padding::valid);
  ASSERT_EQ(y.shape(), (ks::Shape{3, 3, 2}));
  for (std::size_t oy = 0; oy < 3; ++oy)
    for (std::size_t ox = 0; ox < 3; ++ox)
      for (std::size_t c = 0; c < 2; ++c) {
        float best = -1e9f;
        for (std::size_t ky = 0; ky < 3; ++ky)
          for (std::size_t kx = 0; kx < 3; ++kx) best = std::max(best, x.at(oy * 2 + ky, ox * 2 + kx, c));
        EXPECT_EQ(y.at(oy, ox, c), best);
      }
  const auto same = ks::ops::max_pool(x, 3, 2, ks::Padding::same);
  ASSERT_EQ(same.shape(), (ks::Shape{4, 4, 2}));
  for (float v : same.values()) EXPECT_LT(v, 0.0f);  // padding never wins
}

TEST(ZeroPad, PlacesInputInCentre) {
  ks::Tensor x({1, 2, 1}, std::vector<float>{5, 6});
  const auto y = ks::ops::zero_pad(x, {1, 0, 2, 1});
  ASSERT_EQ(y.shape(), (ks::Shape{2, 5, 1}));
  const std::vector<float> expected{0, 0, 0, 0, 0, 0, 0, 5, 6, 0};
  EXPECT_EQ(std::vector<float>(y.values().begin(), y.values().end()), expected);
}

}  // namespace
