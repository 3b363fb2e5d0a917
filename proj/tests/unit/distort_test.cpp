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
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kernelscope/distort.hpp"
#include "../support/oracles.hpp"

namespace ks = kernelscope;

namespace {

ks::Tensor random_image(std::uint64_t seed, std::size_t h = 32, std::size_t w = 32) {
  ks::Xoshiro256pp rng(seed);
  ks::Tensor img({h, w, 3});
  for (float& v : img.values()) v = static_cast<float>(rng.uniform());
  return img;
}

TEST(Distort, IdentitySettingsAreBitExact) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto img = random_image(s);
    ks::Xoshiro256pp rng(s);
    EXPECT_TRUE(ks::bit_equal(ks::apply_contrast(img, 100), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_illuminant(img, {1, 1, 1}), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_blur(img, 0.0), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_gamma(img, 1.0), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_salt_pepper(img, 0.0, 0.5, rng), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_gaussian_noise(img, 0.0, rng), img));
    EXPECT_TRUE(ks::bit_equal(ks::apply_speckle(img, 0.0, rng), img));
  }
}

TEST(Distort, ContrastFormula) {
  const auto img = random_image(1);
  for (double c : {1.0, 5.0, 15.0, 30.0, 50.0, 75.0}) {
    const auto out = ks::apply_contrast(img, c);
    for (std::size_t i = 0; i < img.size(); ++i) {
      ASSERT_NEAR(out[i], (c / 100.0) * img[i] + (1.0 - c / 100.0) / 2.0, 1e-6);
    }
  }
  // Contrast 0 collapses every pixel to mid-grey.
  for (float v : ks::apply_contrast(img, 0).values()) EXPECT_FLOAT_EQ(v, 0.5f);
}

TEST(Distort, IlluminantFormula) {
  const auto img = random_image(2);
  const std::array<double, 3> gains{0.25, 1.0, 0.75};
  const auto out = ks::apply_illuminant(img, gains);
  for (std::size_t i = 0; i < img.size(); ++i) {
    ASSERT_NEAR(out[i], std::min(1.0, std::max(0.0, img[i] * gains[i % 3])), 1e-6);
  }
}

TEST(Distort, GammaFormula) {
  const auto img = random_image(3);
  for (double g : {0.3, 0.8, 1.2, 3.0}) {
    const auto out = ks::apply_gamma(img, g);
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(out[i], std::pow(img[i], g), 1e-6);
  }
}

TEST(Distort, BlurMatchesBruteForceOracle) {
  for (double sigma : {0.5, 1.0, 1.5, 2.5}) {
    const auto img = random_image(static_cast<std::uint64_t>(sigma * 10), 11, 9);
    const auto out = ks::apply_blur(img, sigma);
    const auto want = ks::testing::blur_reference(img, sigma);
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_NEAR(out[i], want[i], 1e-5) << sigma;
  }
}

TEST(Distort, ReflectPaddingIsHalfSampleSymmetric) {
  // Row 0 1 2 3 4 padded by 3: 2 1 0 | 0 1 2 3 4 | 4 3 2
  ks::Tensor ramp({1, 5, 3});
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t c = 0; c < 3; ++c) ramp.at(0, x, c) = 0.1f * static_cast<float>(x);
  const auto out = ks::apply_blur(ramp, 1.0);
  const auto taps = ks::gaussian_taps(1.0);
  ASSERT_EQ(taps.size(), 7u);
  const double padded[] = {0.2, 0.1, 0.0, 0.0, 0.1, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2};
  for (std::size_t x = 0; x < 5; ++x) {
    double acc = 0.0;
    for (std::size_t t = 0; t < 7; ++t) acc += taps[t] * padded[x + t];
    EXPECT_NEAR(out.at(0, x, 0), acc, 1e-6) << x;
  }
}

TEST(Distort, BlurPreservesConstantImage) {
  ks::Tensor flat({6, 6, 3}, 0.4f);
  const auto blurred = ks::apply_blur(flat, 1.5);
  for (float v : blurred.values()) EXPECT_NEAR(v, 0.4f, 1e-6);
}

// Mid-grey test card: every pixel 0.5 so salt and pepper changes are visible
// and additive noise is never clipped at these noise levels.
ks::Tensor grey(std::size_t n = 64) { return ks::Tensor({n, n, 3}, 0.5f); }

TEST(Distort, SaltPepperAlteredFraction) {
  for (double p : {0.01, 0.05, 0.10}) {
    ks::Xoshiro256pp rng(static_cast<std::uint64_t>(p * 1000));
    std::size_t altered = 0, salt = 0, total = 0;
    for (int rep = 0; rep < 25; ++rep) {
      const auto out = ks::apply_salt_pepper(grey(), p, 0.5, rng);
      for (std::size_t q = 0; q < 64 * 64; ++q) {
        const float r = out[q * 3], g = out[q * 3 + 1], b = out[q * 3 + 2];
        ASSERT_TRUE(r == g && g == b);
        if (r != 0.5f) {
          ++altered;
          salt += r == 1.0f;
        }
        ++total;
      }
    }
    EXPECT_NEAR(static_cast<double>(altered) / total, p, 0.005) << p;
    EXPECT_NEAR(static_cast<double>(salt) / altered, 0.5, 0.05) << p;
  }
}

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TEST(Distort, GaussianNoiseStd) {
  for (double sigma : {0.01, 0.05, 0.10}) {
    ks::Xoshiro256pp rng(17);
    std::vector<double> diffs;
    for (int rep = 0; rep < 25; ++rep) {
      const auto out = ks::apply_gaussian_noise(grey(), sigma, rng);
      for (float v : out.values()) diffs.push_back(v - 0.5);
    }
    EXPECT_NEAR(sample_std(diffs) / sigma, 1.0, 0.01) << sigma;
  }
}

TEST(Distort, SpeckleNoiseStd) {
  for (double sigma : {0.01, 0.05, 0.10}) {
    ks::Xoshiro256pp rng(23);
    std::vector<double> ratios;
    for (int rep = 0; rep < 25; ++rep) {
      const auto out = ks::apply_speckle(grey(), sigma, rng);
      for (float v : out.values()) ratios.push_back(v / 0.5 - 1.0);
    }
    EXPECT_NEAR(sample_std(ratios) / sigma, 1.0, 0.01) << sigma;
  }
}

TEST(Distort, PoissonMean) {
  for (float level : {0.1f, 0.5f, 0.8f}) {
    ks::Xoshiro256pp rng(31);
    double sum = 0.0;
    std::size_t n = 0;
    for (int rep = 0; rep < 5; ++rep) {
      const auto out = ks::apply_poisson(ks::Tensor({64, 64, 3}, level), 255.0, rng);
      for (float v : out.values()) {
        sum += v;
        ++n;
        ASSERT_EQ(std::round(v * 255.0), v * 255.0f) << "values are k / scale";
      }
    }
    EXPECT_NEAR(sum / n, level, 0.005) << level;
  }
}

TEST(Distort, NoiseIsSeededPerConditionAndImage) {
  const auto img = random_image(5);
  const ks::DistortionSpec spec{ks::GaussianNoise{0.05}, 7, 30};
  EXPECT_TRUE(ks::bit_equal(ks::apply_distortion(img, spec, 4), ks::apply_distortion(img, spec, 4)));
  EXPECT_FALSE(ks::bit_equal(ks::apply_distortion(img, spec, 4), ks::apply_distortion(img, spec, 5)));
  ks::DistortionSpec other = spec;
  other.condition_index = 31;
  EXPECT_FALSE(ks::bit_equal(ks::apply_distortion(img, spec, 4), ks::apply_distortion(img, other, 4)));
  ks::Xoshiro256pp rng(ks::derive_stream_seed(7, 30, 4));
  EXPECT_TRUE(ks::bit_equal(ks::apply_distortion(img, spec, 4), ks::apply_gaussian_noise(img, 0.05, rng)));
}

TEST(Distort, RejectsOutOfRangeParameters) {
  const auto img = random_image(6, 4, 4);
  ks::Xoshiro256pp rng(1);
  EXPECT_THROW((void)ks::apply_contrast(img, -1), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_contrast(img, 101), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_gamma(img, 0.0), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_blur(img, -0.5), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_salt_pepper(img, 1.5, 0.5, rng), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_gaussian_noise(img, -0.1, rng), ks::ValidationError);
  EXPECT_THROW((void)ks::apply_illuminant(img, {-1, 1, 1}), ks::ValidationError);
}

TEST(ConditionGrid, HasThirtyFourConditionsInOrder) {
  const auto grid = ks::build_condition_grid(0);
  ASSERT_EQ(grid.size(), 34u);
  const std::vector<std::pair<ks::DistortionKind, std::size_t>> blocks{
      {ks::DistortionKind::contrast, 7},    {ks::DistortionKind::illuminant, 5},
      {ks::DistortionKind::gamma, 5},       {ks::DistortionKind::blur, 4},
      {ks::DistortionKind::salt_pepper, 4}, {ks::DistortionKind::gaussian_noise, 4},
      {ks::DistortionKind::speckle, 4},     {ks::DistortionKind::poisson, 1}};
  std::size_t i = 0;
  for (const auto& [kind, count] : blocks) {
    for (std::size_t k = 0; k < count; ++k, ++i) EXPECT_EQ(grid.conditions[i].kind, kind) << i;
  }
  EXPECT_EQ(grid.conditions[2].id, "contrast/15");
  EXPECT_EQ(grid.conditions[7].id, "illuminant/0.05");
  EXPECT_EQ(grid.conditions[33].id, "poisson/255");
  const auto ids = grid.ids();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 34u);
}

TEST(ConditionGrid, VariantsAndIdentityFlags) {
  const auto grid = ks::build_condition_grid(9);
  std::size_t identities = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = grid.conditions[i];
    identities += c.identity;
    const bool dimmed_light = c.kind == ks::DistortionKind::illuminant && c.parameter < 1.0;
    EXPECT_EQ(c.variants.size(), dimmed_light ? 3u : 1u) << c.id;
    for (const auto& v : c.variants) {
      EXPECT_EQ(v.global_seed, 9u);
      EXPECT_EQ(v.condition_index, i);
    }
  }
  // contrast 100, illuminant 1, gamma 1, blur 0, and the three noise-0 slots
  EXPECT_EQ(identities, 7u);
  const auto& sp = grid.conditions[22];
  ASSERT_EQ(sp.kind, ks::DistortionKind::salt_pepper);
  EXPECT_DOUBLE_EQ(std::get<ks::SaltPepper>(sp.variants[0].params).density, 0.01);
}

TEST(ConditionGrid, IdentityConditionsLeaveImagesUntouched) {
  const auto grid = ks::build_condition_grid(3);
  const auto img = random_image(12);
  for (const auto& c : grid.conditions) {
    if (!c.identity) continue;
    for (const auto& v : c.variants) EXPECT_TRUE(ks::bit_equal(ks::apply_distortion(img, v, 0), img)) << c.id;
  }
}

}  // namespace
