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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/dataset.hpp"
#include "kernelscope/graph.hpp"

namespace kernelscope {

// Appends layers in order and names their weight tensors "<layer>/<role>".
class GraphBuilder {
 public:
  GraphBuilder(std::string arch, Shape input_shape) {
    meta_.arch = std::move(arch);
    meta_.input_shape = std::move(input_shape);
    layers_.push_back({"input", LayerKind::input, {}, std::monostate{}, {}});
  }

  std::string conv(const std::string& name, const std::string& input, std::size_t kernel,
                   std::size_t filters, std::size_t stride = 1, Padding padding = Padding::same,
                   bool bias = true) {
    std::vector<std::string> weights{name + "/kernel"};
    if (bias) weights.push_back(name + "/bias");
    layers_.push_back({name, LayerKind::conv2d, {input},
                       ConvHyper{kernel, kernel, filters, stride, padding, bias},
                       std::move(weights)});
    return name;
  }

  std::string batchnorm(const std::string& name, const std::string& input, double epsilon = 1e-3) {
    layers_.push_back({name, LayerKind::batchnorm, {input}, BatchNormHyper{epsilon},
                       {name + "/gamma", name + "/beta", name + "/moving_mean",
                        name + "/moving_variance"}});
    return name;
  }

  std::string relu(const std::string& name, const std::string& input) {
    return simple(name, LayerKind::relu, {input});
  }

  std::string add(const std::string& name, std::vector<std::string> inputs) {
    return simple(name, LayerKind::add, std::move(inputs));
  }

  std::string global_avg_pool(const std::string& name, const std::string& input) {
    return simple(name, LayerKind::global_avg_pool, {input});
  }

  std::string dense(const std::string& name, const std::string& input, std::size_t units,
                    bool bias = true) {
    std::vector<std::string> weights{name + "/kernel"};
    if (bias) weights.push_back(name + "/bias");
    layers_.push_back({name, LayerKind::dense, {input}, DenseHyper{units, bias}, std::move(weights)});
    return name;
  }

  std::string softmax(const std::string& name, const std::string& input) {
    return simple(name, LayerKind::softmax, {input});
  }

  std::string max_pool(const std::string& name, const std::string& input, std::size_t size,
                       std::size_t stride, Padding padding = Padding::valid) {
    layers_.push_back({name, LayerKind::max_pool, {input}, PoolHyper{size, stride, padding}, {}});
    return name;
  }

  std::string zero_pad(const std::string& name, const std::string& input, std::size_t pad) {
    layers_.push_back({name, LayerKind::zero_pad, {input}, PadHyper{{pad, pad, pad, pad}}, {}});
    return name;
  }

  ModelGraph build() && { return ModelGraph(std::move(layers_), std::move(meta_)); }

 private:
  std::string simple(const std::string& name, LayerKind kind, std::vector<std::string> inputs) {
    layers_.push_back({name, kind, std::move(inputs), std::monostate{}, {}});
    return name;
  }

  std::vector<LayerSpec> layers_;
  GraphMeta meta_;
};

// CIFAR ResNet-20 (3 stages x 3 basic blocks, 16/32/64 channels). Every conv
// has a bias; every conv except the 1x1 projection shortcuts is followed by
// batchnorm. 274,442 parameters.
inline ModelGraph build_resnet20(std::size_t classes = 10) {
  GraphBuilder g("resnet20", {32, 32, 3});
  std::string x = g.relu("conv1_relu", g.batchnorm("conv1_bn", g.conv("conv1", "input", 3, 16)));
  const std::size_t widths[] = {16, 32, 64};
  for (std::size_t stage = 0; stage < 3; ++stage) {
    for (std::size_t block = 0; block < 3; ++block) {
      const std::string p =
          "stage" + std::to_string(stage + 1) + "_block" + std::to_string(block + 1);
      const std::size_t stride = (stage > 0 && block == 0) ? 2 : 1;
      std::string y = g.conv(p + "_conv1", x, 3, widths[stage], stride);
      y = g.relu(p + "_relu1", g.batchnorm(p + "_bn1", y));
      y = g.batchnorm(p + "_bn2", g.conv(p + "_conv2", y, 3, widths[stage]));
      std::string shortcut = x;
      if (stride != 1) shortcut = g.conv(p + "_shortcut", x, 1, widths[stage], stride);
      x = g.relu(p + "_out", g.add(p + "_add", {shortcut, y}));
    }
  }
  x = g.global_avg_pool("avg_pool", x);
  g.softmax("softmax", g.dense("fc", x, classes));
  return std::move(g).build();
}

// ImageNet ResNet-50 (bottleneck blocks 3/4/6/3) with the conventional layer
// names (conv1, res2a_branch2a, bn2a_branch2a, ..., fc1000). Convs carry
// biases and every conv, shortcut projections included, is followed by
// batchnorm. 25,636,712 parameters.
inline ModelGraph build_resnet50(std::size_t classes = 1000) {
  GraphBuilder g("resnet50", {224, 224, 3});
  std::string x = g.zero_pad("conv1_pad", "input", 3);
  x = g.conv("conv1", x, 7, 64, 2, Padding::valid);
  x = g.relu("conv1_relu", g.batchnorm("bn_conv1", x));
  x = g.zero_pad("pool1_pad", x, 1);
  x = g.max_pool("pool1", x, 3, 2);

  struct Stage {
    int index;
    int blocks;
    std::size_t mid;
    std::size_t out;
  };
  const Stage stages[] = {{2, 3, 64, 256}, {3, 4, 128, 512}, {4, 6, 256, 1024}, {5, 3, 512, 2048}};
  for (const Stage& s : stages) {
    for (int b = 0; b < s.blocks; ++b) {
      const std::string id = std::to_string(s.index) + static_cast<char>('a' + b);
      const std::size_t stride = (b == 0 && s.index > 2) ? 2 : 1;
      auto unit = [&](const std::string& branch, const std::string& input, std::size_t kernel,
                      std::size_t filters, std::size_t st) {
        const std::string conv = g.conv("res" + id + "_" + branch, input, kernel, filters, st);
        return g.batchnorm("bn" + id + "_" + branch, conv);
      };
      std::string y = g.relu("res" + id + "_branch2a_relu", unit("branch2a", x, 1, s.mid, stride));
      y = g.relu("res" + id + "_branch2b_relu", unit("branch2b", y, 3, s.mid, 1));
      y = unit("branch2c", y, 1, s.out, 1);
      std::string shortcut = x;
      if (b == 0) shortcut = unit("branch1", x, 1, s.out, stride);
      x = g.relu("res" + id + "_relu", g.add("res" + id, {shortcut, y}));
    }
  }
  x = g.global_avg_pool("avg_pool", x);
  g.softmax("softmax", g.dense("fc1000", x, classes));
  return std::move(g).build();
}

// Small two-conv network used for quick end-to-end runs.
inline ModelGraph build_toy_cnn(std::size_t classes = 10, std::size_t side = 32,
                                std::size_t width = 8) {
  GraphBuilder g("toy-cnn", {side, side, 3});
  std::string x = g.relu("conv1_relu", g.batchnorm("conv1_bn", g.conv("conv1", "input", 3, width)));
  x = g.relu("conv2_relu", g.batchnorm("conv2_bn", g.conv("conv2", x, 3, width, 2)));
  x = g.global_avg_pool("avg_pool", x);
  g.softmax("softmax", g.dense("fc", x, classes));
  return std::move(g).build();
}

// Nearest-mean-colour classifier for make_synthetic_dataset data: an identity
// 1x1 conv, global average pooling, and a dense head scoring
// 2 mu_k . m - |mu_k|^2, which is maximal for the class mean nearest to the
// image mean colour m.
inline std::pair<ModelGraph, CheckpointBundle> build_nearest_mean_classifier(
    std::uint32_t class_count, std::size_t h, std::size_t w) {
  GraphBuilder g("nearest-mean", {h, w, 3});
  std::string x = g.conv("mix", "input", 1, 3);
  x = g.global_avg_pool("avg_pool", x);
  g.softmax("softmax", g.dense("fc", x, class_count));
  ModelGraph graph = std::move(g).build();

  CheckpointBundle bundle;
  bundle.meta.arch = "nearest-mean";
  bundle.meta.provenance = "hand-built nearest-mean classifier";
  Tensor mix({1, 1, 3, 3});
  for (std::size_t c = 0; c < 3; ++c) mix[c * 3 + c] = 1.0f;
  bundle.tensors.emplace("mix/kernel", std::move(mix));
  bundle.tensors.emplace("mix/bias", Tensor({3}));
  Tensor kernel({3, class_count});
  Tensor bias({class_count});
  for (std::uint32_t k = 0; k < class_count; ++k) {
    const auto mu = synthetic_class_mean(k, class_count);
    float norm = 0.0f;
    for (std::size_t c = 0; c < 3; ++c) {
      kernel[c * class_count + k] = 2.0f * mu[c];
      norm += mu[c] * mu[c];
    }
    bias[k] = -norm;
  }
  bundle.tensors.emplace("fc/kernel", std::move(kernel));
  bundle.tensors.emplace("fc/bias", std::move(bias));
  return {std::move(graph), std::move(bundle)};
}

inline ModelGraph build_architecture(const std::string& arch, std::size_t classes = 0) {
  if (arch == "resnet20") return build_resnet20(classes ? classes : 10);
  if (arch == "resnet50") return build_resnet50(classes ? classes : 1000);
  if (arch == "toy-cnn") return build_toy_cnn(classes ? classes : 10);
  detail::fail("unknown architecture '" + arch + "' (expected resnet20, resnet50, toy-cnn)");
}

}  // namespace kernelscope
