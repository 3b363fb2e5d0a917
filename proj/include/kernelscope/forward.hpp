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
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/ops.hpp"
#include "kernelscope/parallel.hpp"
#include "kernelscope/rng.hpp"
#include "kernelscope/tensor.hpp"

namespace kernelscope {

// Runs one (h, w, c) image through the graph and returns the softmax output.
// The bundle is assumed to have passed validate_bundle().
inline Tensor forward_image(const ModelGraph& graph, const CheckpointBundle& bundle,
                            const Tensor& image) {
  const auto& layers = graph.layers();
  detail::require(image.shape() == graph.meta().input_shape,
                  "input image shape " + shape_string(image.shape()) + " does not match graph " +
                      shape_string(graph.meta().input_shape));

  // Free each activation after its last consumer has run.
  std::vector<std::size_t> last_use(layers.size(), 0);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t k = 0; k < layers[i].inputs.size(); ++k) {
      last_use[graph.input_index(i, k)] = i;
    }
  }

  std::vector<Tensor> act(layers.size());
  auto weight = [&](const LayerSpec& spec, std::size_t k) -> const Tensor& {
    return bundle.at(spec.weights.at(k));
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& spec = layers[i];
    auto in = [&](std::size_t slot) -> const Tensor& { return act[graph.input_index(i, slot)]; };
    switch (spec.kind) {
      case LayerKind::input: {
        act[i] = image;
        if (const auto& mean = graph.meta().channel_mean) {
          auto v = act[i].values();
          for (std::size_t p = 0; p < v.size(); ++p) v[p] -= (*mean)[p % mean->size()];
        }
        break;
      }
      case LayerKind::conv2d: {
        const auto& h = spec.conv();
        act[i] = ops::conv2d(in(0), weight(spec, 0), h.bias ? &weight(spec, 1) : nullptr,
                             h.stride, h.padding);
        break;
      }
      case LayerKind::batchnorm:
        act[i] = ops::batchnorm_inference(in(0), weight(spec, 0), weight(spec, 1),
                                          weight(spec, 2), weight(spec, 3),
                                          spec.batchnorm().epsilon);
        break;
      case LayerKind::relu:
        act[i] = ops::relu(in(0));
        break;
      case LayerKind::add: {
        Tensor sum = in(0);
        for (std::size_t k = 1; k < spec.inputs.size(); ++k) sum = ops::add(sum, in(k));
        act[i] = std::move(sum);
        break;
      }
      case LayerKind::global_avg_pool:
        act[i] = ops::global_avg_pool(in(0));
        break;
      case LayerKind::dense: {
        const auto& h = spec.dense();
        act[i] = ops::dense(in(0), weight(spec, 0), h.bias ? &weight(spec, 1) : nullptr);
        break;
      }
      case LayerKind::softmax:
        act[i] = ops::softmax(in(0));
        break;
      case LayerKind::max_pool: {
        const auto& h = spec.pool();
        act[i] = ops::max_pool(in(0), h.size, h.stride, h.padding);
        break;
      }
      case LayerKind::zero_pad:
        act[i] = ops::zero_pad(in(0), spec.zero_pad().pad);
        break;
    }
    detail::require(act[i].shape() == graph.output_shape(i),
                    "shape propagation failure at layer '" + spec.name + "'");
    for (std::size_t k = 0; k < spec.inputs.size(); ++k) {
      const std::size_t src = graph.input_index(i, k);
      if (last_use[src] == i) act[src] = Tensor();
    }
  }
  return std::move(act.back());
}

// Class probabilities (n, classes) for an (n, h, w, c) batch. Images are
// independent, so the result does not depend on `threads`.
inline Tensor forward(const ModelGraph& graph, const CheckpointBundle& bundle, const Tensor& batch,
                      std::size_t threads = 1) {
  validate_bundle(graph, bundle);
  detail::require(batch.rank() == 4, "forward expects an (n, h, w, c) batch");
  const std::size_t n = batch.dim(0);
  std::vector<Tensor> outputs(n);
  parallel_for(n, threads, [&](std::size_t i) {
    outputs[i] = forward_image(graph, bundle, batch.slice(i));
  });
  return stack(outputs);
}

// Index of the largest probability; ties resolve to the lowest index.
inline std::uint32_t argmax(std::span<const float> probabilities) {
  return static_cast<std::uint32_t>(
      std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

// Fresh weights for every tensor the graph declares: He-normal conv and dense
// kernels, small normal biases, and batchnorm vectors near the identity.
inline CheckpointBundle random_bundle(const ModelGraph& graph, std::uint64_t seed,
                                      std::string provenance = "random-init") {
  Xoshiro256pp rng(seed);
  CheckpointBundle bundle;
  bundle.meta.arch = graph.meta().arch;
  bundle.meta.provenance = std::move(provenance) + " seed=" + std::to_string(seed);
  for (std::size_t i = 0; i < graph.layers().size(); ++i) {
    const LayerSpec& spec = graph.layers()[i];
    const auto shapes = graph.weight_shapes(i);
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      Tensor t(shapes[k]);
      auto v = t.values();
      if (spec.kind == LayerKind::batchnorm) {
        // gamma, beta, moving mean, moving variance
        for (float& x : v) {
          const double z = rng.normal();
          x = static_cast<float>(k == 0 ? 1.0 + 0.1 * z
                                 : k == 3 ? 1.0 + 0.1 * std::abs(z)
                                          : 0.1 * z);
        }
      } else if (k == 0) {
        const std::size_t fan_in = element_count(shapes[k]) / shapes[k].back();
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (float& x : v) x = static_cast<float>(scale * rng.normal());
      } else {
        for (float& x : v) x = static_cast<float>(0.01 * rng.normal());
      }
      bundle.tensors.emplace(spec.weights[k], std::move(t));
    }
  }
  return bundle;
}

// Largest absolute difference between forward() on the stored inputs and the
// stored reference probabilities of a verification-vectors container
// (tensors "inputs" (n, h, w, c) and "probabilities" (n, classes)).
inline double verification_max_abs_diff(const ModelGraph& graph, const CheckpointBundle& bundle,
                                        const CheckpointBundle& vectors, std::size_t threads = 1) {
  const Tensor& inputs = vectors.at("inputs");
  const Tensor& expected = vectors.at("probabilities");
  const Tensor actual = forward(graph, bundle, inputs, threads);
  detail::require(actual.shape() == expected.shape(),
                  "verification probabilities have shape " + shape_string(expected.shape()) +
                      ", engine produced " + shape_string(actual.shape()));
  double worst = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(actual[i]) - expected[i]));
  }
  return worst;
}

}  // namespace kernelscope
