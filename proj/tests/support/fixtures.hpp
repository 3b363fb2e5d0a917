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

// Shared hand-built networks and data for the unit and acceptance tests.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "kernelscope/kernelscope.hpp"

namespace kernelscope::testing {

// input (3,3,2) -> conv 2x2 valid, 2 filters, bias -> batchnorm -> relu
// -> global average pool -> dense 2x3 with bias -> softmax.
inline std::pair<ModelGraph, CheckpointBundle> tiny_network() {
  GraphBuilder g("tiny", {3, 3, 2});
  std::string x = g.conv("conv", "input", 2, 2, 1, Padding::valid);
  x = g.relu("relu", g.batchnorm("bn", x));
  x = g.global_avg_pool("gap", x);
  g.softmax("softmax", g.dense("fc", x, 3));
  ModelGraph graph = std::move(g).build();

  CheckpointBundle b;
  b.meta.arch = "tiny";
  // kernel (kh, kw, c_in, c_out)
  b.tensors.emplace("conv/kernel",
                    Tensor({2, 2, 2, 2}, std::vector<float>{0.5f, -0.25f, 0.1f, 0.3f, -0.2f, 0.4f,
                                                           0.6f, -0.1f, 0.05f, 0.2f, -0.3f, 0.15f,
                                                           0.25f, -0.5f, 0.35f, 0.45f}));
  b.tensors.emplace("conv/bias", Tensor({2}, std::vector<float>{0.1f, -0.05f}));
  b.tensors.emplace("bn/gamma", Tensor({2}, std::vector<float>{1.2f, 0.8f}));
  b.tensors.emplace("bn/beta", Tensor({2}, std::vector<float>{0.05f, 0.1f}));
  b.tensors.emplace("bn/moving_mean", Tensor({2}, std::vector<float>{0.2f, -0.1f}));
  b.tensors.emplace("bn/moving_variance", Tensor({2}, std::vector<float>{0.5f, 1.5f}));
  b.tensors.emplace("fc/kernel", Tensor({2, 3}, std::vector<float>{1.0f, -0.5f, 0.25f, 0.3f, 0.7f, -1.1f}));
  b.tensors.emplace("fc/bias", Tensor({3}, std::vector<float>{0.0f, 0.2f, -0.1f}));
  return {std::move(graph), std::move(b)};
}

// Independent evaluation of tiny_network() written out longhand.
inline std::array<double, 3> tiny_network_by_hand(const CheckpointBundle& b, const Tensor& image) {
  auto w = [&](const char* name, std::size_t i) { return static_cast<double>(b.at(name)[i]); };
  double pooled[2] = {0.0, 0.0};
  for (int f = 0; f < 2; ++f) {
    for (int oy = 0; oy < 2; ++oy) {
      for (int ox = 0; ox < 2; ++ox) {
        double z = w("conv/bias", f);
        for (int ky = 0; ky < 2; ++ky)
          for (int kx = 0; kx < 2; ++kx)
            for (int c = 0; c < 2; ++c)
              z += image.at(oy + ky, ox + kx, c) * w("conv/kernel", ((ky * 2 + kx) * 2 + c) * 2 + f);
        z = w("bn/gamma", f) * (z - w("bn/moving_mean", f)) / std::sqrt(w("bn/moving_variance", f) + 1e-3) +
            w("bn/beta", f);
        pooled[f] += std::max(z, 0.0) / 4.0;
      }
    }
  }
  std::array<double, 3> logits{};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    logits[k] = w("fc/bias", k) + pooled[0] * w("fc/kernel", k) + pooled[1] * w("fc/kernel", 3 + k);
  }
  for (double& l : logits) total += (l = std::exp(l));
  for (double& l : logits) l /= total;
  return logits;
}

inline Tensor tiny_input(std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Tensor t({3, 3, 2});
  for (float& v : t.values()) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
  return t;
}

}  // namespace kernelscope::testing
