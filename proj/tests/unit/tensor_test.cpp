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
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "kernelscope/tensor.hpp"

namespace ks = kernelscope;

namespace {

TEST(Tensor, ShapeAndFill) {
  ks::Tensor t({2, 3, 4}, 1.5f);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(ks::shape_string(t.shape()), "(2,3,4)");
  for (float v : t.values()) EXPECT_EQ(v, 1.5f);
}

TEST(Tensor, RejectsMismatchedData) {
  EXPECT_THROW(ks::Tensor({2, 2}, std::vector<float>{1, 2, 3}), ks::ValidationError);
}

TEST(Tensor, HwcIndexingIsRowMajor) {
  std::vector<float> data(2 * 3 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i);
  ks::Tensor t({2, 3, 3}, data);
  EXPECT_EQ(t.at(1, 2, 0), 15.0f);
  EXPECT_EQ(t.at(0, 1, 2), 5.0f);
}

TEST(Tensor, SliceAndStackRoundTrip) {
  std::vector<float> data(3 * 2 * 2 * 1);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i) * 0.5f;
  ks::Tensor batch({3, 2, 2, 1}, data);
  std::vector<ks::Tensor> items;
  for (std::size_t i = 0; i < 3; ++i) items.push_back(batch.slice(i));
  EXPECT_EQ(items[1].shape(), (ks::Shape{2, 2, 1}));
  EXPECT_EQ(items[1].values()[0], 2.0f);
  EXPECT_TRUE(ks::bit_equal(ks::stack(items), batch));
}

TEST(Tensor, BitEqualDistinguishesSignedZeroAndNaNPayload) {
  ks::Tensor a({1}, 0.0f), b({1}, -0.0f);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(ks::bit_equal(a, b));
  ks::Tensor n({1}, std::numeric_limits<float>::quiet_NaN());
  EXPECT_TRUE(ks::bit_equal(n, n));
  EXPECT_FALSE(n.all_finite());
  EXPECT_TRUE(a.all_finite());
}

}  // namespace
