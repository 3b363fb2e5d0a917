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
#include <vector>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"

namespace ks = kernelscope;

namespace {

TEST(Forward, TinyNetworkMatchesHandComputation) {
  auto [graph, bundle] = ks::testing::tiny_network();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto image = ks::testing::tiny_input(seed);
    const auto probs = ks::forward_image(graph, bundle, image);
    const auto expected = ks::testing::tiny_network_by_hand(bundle, image);
    ASSERT_EQ(probs.shape(), (ks::Shape{3}));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(probs[k], expected[k], 1e-6) << seed;
  }
}

TEST(Forward, BatchResultIndependentOfThreadCount) {
  const auto graph = ks::build_toy_cnn(10, 16, 4);
  const auto bundle = ks::random_bundle(graph, 7);
  const auto data = ks::make_synthetic_dataset(1, 13, 16, 16, 10);
  const auto one = ks::forward(graph, bundle, data.images, 1);
  const auto four = ks::forward(graph, bundle, data.images, 4);
  EXPECT_TRUE(ks::bit_equal(one, four));
  EXPECT_EQ(one.shape(), (ks::Shape{13, 10}));
  for (std::size_t i = 0; i < 13; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 10; ++k) sum += one[i * 10 + k];
    EXPECT_NEAR(sum, 1.0, 1e-5);
  }
}

TEST(Forward, ResNet20RunsEndToEnd) {
  const auto graph = ks::build_resnet20();
  const auto bundle = ks::random_bundle(graph, 2);
  const auto data = ks::make_synthetic_dataset(2, 2, 32, 32, 10);
  const auto probs = ks::forward(graph, bundle, data.images);
  EXPECT_TRUE(probs.all_finite());
  EXPECT_EQ(probs.shape(), (ks::Shape{2, 10}));
}

TEST(Forward, ChannelMeanIsSubtracted) {
  auto [graph, bundle] = ks::testing::tiny_network();
  auto json = ks::to_json(graph);
  json["meta"]["channel_mean"] = {0.25, -0.5};
  const auto shifted_graph = ks::graph_from_json(json);
  const auto image = ks::testing::tiny_input(3);
  ks::Tensor centred = image;
  for (std::size_t i = 0; i < centred.size(); ++i) centred[i] -= (i % 2 == 0) ? 0.25f : -0.5f;
  EXPECT_TRUE(ks::bit_equal(ks::forward_image(shifted_graph, bundle, image),
                            ks::forward_image(graph, bundle, centred)));
}

TEST(Forward, RejectsWrongInputShape) {
  auto [graph, bundle] = ks::testing::tiny_network();
  EXPECT_THROW((void)ks::forward_image(graph, bundle, ks::Tensor({4, 4, 2})), ks::ValidationError);
}

TEST(Forward, ArgmaxTiesGoToLowestIndex) {
  const std::vector<float> p{0.1f, 0.4f, 0.4f, 0.1f};
  EXPECT_EQ(ks::argmax(p), 1u);
}

TEST(Forward, RandomBundleIsDeterministicAndValid) {
  const auto graph = ks::build_resnet20();
  const auto a = ks::random_bundle(graph, 5);
  EXPECT_TRUE(ks::bit_equal(a, ks::random_bundle(graph, 5)));
  EXPECT_FALSE(ks::bit_equal(a, ks::random_bundle(graph, 6)));
  ks::validate_bundle(graph, a);
}

TEST(Forward, VerificationVectors) {
  auto [graph, bundle] = ks::testing::tiny_network();
  std::vector<ks::Tensor> inputs;
  std::vector<float> probs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    inputs.push_back(ks::testing::tiny_input(s));
    for (double p : ks::testing::tiny_network_by_hand(bundle, inputs.back())) {
      probs.push_back(static_cast<float>(p));
    }
  }
  ks::CheckpointBundle vectors;
  vectors.tensors.emplace("inputs", ks::stack(inputs));
  vectors.tensors.emplace("probabilities", ks::Tensor({4, 3}, probs));
  const auto roundtrip = ks::decode_bundle(ks::encode_bundle(vectors));
  EXPECT_LT(ks::verification_max_abs_diff(graph, bundle, roundtrip), 1e-6);

  auto perturbed = vectors;
  perturbed.tensors.at("probabilities")[0] += 0.01f;
  EXPECT_NEAR(ks::verification_max_abs_diff(graph, bundle, perturbed), 0.01, 1e-5);
}

}  // namespace
