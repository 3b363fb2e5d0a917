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
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kernelscope/error.hpp"
#include "kernelscope/tensor.hpp"

namespace kernelscope {

enum class LayerKind {
  input,
  conv2d,
  batchnorm,
  relu,
  add,
  global_avg_pool,
  dense,
  softmax,
  max_pool,
  zero_pad,
};

enum class Padding { same, valid };

struct ConvHyper {
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t filters = 1;
  std::size_t stride = 1;
  Padding padding = Padding::same;
  bool bias = true;
  friend bool operator==(const ConvHyper&, const ConvHyper&) = default;
};

struct BatchNormHyper {
  double epsilon = 1e-3;
  friend bool operator==(const BatchNormHyper&, const BatchNormHyper&) = default;
};

struct DenseHyper {
  std::size_t units = 1;
  bool bias = true;
  friend bool operator==(const DenseHyper&, const DenseHyper&) = default;
};

struct PoolHyper {
  std::size_t size = 2;
  std::size_t stride = 2;
  Padding padding = Padding::valid;
  friend bool operator==(const PoolHyper&, const PoolHyper&) = default;
};

// Explicit zero padding: top, bottom, left, right.
struct PadHyper {
  std::array<std::size_t, 4> pad{};
  friend bool operator==(const PadHyper&, const PadHyper&) = default;
};

using LayerHyper =
    std::variant<std::monostate, ConvHyper, BatchNormHyper, DenseHyper, PoolHyper, PadHyper>;

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::input;
  std::vector<std::string> inputs;
  LayerHyper hyper;
  std::vector<std::string> weights;

  const ConvHyper& conv() const { return std::get<ConvHyper>(hyper); }
  const BatchNormHyper& batchnorm() const { return std::get<BatchNormHyper>(hyper); }
  const DenseHyper& dense() const { return std::get<DenseHyper>(hyper); }
  const PoolHyper& pool() const { return std::get<PoolHyper>(hyper); }
  const PadHyper& zero_pad() const { return std::get<PadHyper>(hyper); }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct GraphMeta {
  std::string arch;
  Shape input_shape;  // (h, w, c)
  std::optional<std::vector<float>> channel_mean;
  friend bool operator==(const GraphMeta&, const GraphMeta&) = default;
};

inline std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::input: return "input";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::relu: return "relu";
    case LayerKind::add: return "add";
    case LayerKind::global_avg_pool: return "global-avg-pool";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
    case LayerKind::max_pool: return "max-pool";
    case LayerKind::zero_pad: return "zero-pad";
  }
  return "?";
}

inline LayerKind layer_kind_from_string(const std::string& text) {
  for (LayerKind kind :
       {LayerKind::input, LayerKind::conv2d, LayerKind::batchnorm, LayerKind::relu,
        LayerKind::add, LayerKind::global_avg_pool, LayerKind::dense, LayerKind::softmax,
        LayerKind::max_pool, LayerKind::zero_pad}) {
    if (to_string(kind) == text) return kind;
  }
  detail::fail("unknown layer kind '" + text + "'");
}

// Output extent along one spatial axis.
inline std::size_t output_extent(std::size_t in, std::size_t window, std::size_t stride,
                                 Padding padding) {
  if (padding == Padding::same) return (in + stride - 1) / stride;
  detail::require(in >= window, "window larger than input under valid padding");
  return (in - window) / stride + 1;
}

// Leading zero padding for "same" mode; any odd remainder goes to the
// bottom/right edge.
inline std::size_t leading_pad(std::size_t in, std::size_t window, std::size_t stride,
                               Padding padding) {
  if (padding == Padding::valid) return 0;
  const std::size_t out = output_extent(in, window, stride, padding);
  const std::size_t needed = (out - 1) * stride + window;
  return needed > in ? (needed - in) / 2 : 0;
}

// Ordered layer list plus the metadata needed to run and count it. The
// constructor checks topological order, arity, and end-to-end shape
// propagation.
class ModelGraph {
 public:
  ModelGraph() = default;

  ModelGraph(std::vector<LayerSpec> layers, GraphMeta meta)
      : layers_(std::move(layers)), meta_(std::move(meta)) {
    validate();
  }

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  const GraphMeta& meta() const noexcept { return meta_; }
  const Shape& output_shape(std::size_t layer) const { return shapes_.at(layer); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const LayerSpec& layer(const std::string& name) const {
    auto index = find(name);
    detail::require(index.has_value(), "unknown layer '" + name + "'");
    return layers_[*index];
  }

  // Shapes the layer's weight tensors must have, in the order of
  // LayerSpec::weights: conv (kh, kw, c_in, c_out) [+ (c_out)]; batchnorm
  // gamma, beta, moving mean, moving variance; dense (d_in, d_out) [+ (d_out)].
  std::vector<Shape> weight_shapes(std::size_t layer) const {
    const LayerSpec& spec = layers_.at(layer);
    std::vector<Shape> shapes;
    switch (spec.kind) {
      case LayerKind::conv2d: {
        const auto& h = spec.conv();
        const std::size_t c_in = input_shape_of(layer, 0).back();
        shapes.push_back({h.kernel_h, h.kernel_w, c_in, h.filters});
        if (h.bias) shapes.push_back({h.filters});
        break;
      }
      case LayerKind::batchnorm: {
        const std::size_t c = input_shape_of(layer, 0).back();
        shapes.assign(4, Shape{c});
        break;
      }
      case LayerKind::dense: {
        const auto& h = spec.dense();
        shapes.push_back({input_shape_of(layer, 0).back(), h.units});
        if (h.bias) shapes.push_back({h.units});
        break;
      }
      default:
        break;
    }
    return shapes;
  }

  // Indices of conv2d layers in graph order.
  std::vector<std::size_t> conv_layers() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].kind == LayerKind::conv2d) out.push_back(i);
    }
    return out;
  }

  std::size_t input_index(std::size_t layer, std::size_t slot) const {
    return index_.at(layers_.at(layer).inputs.at(slot));
  }

  friend bool operator==(const ModelGraph& a, const ModelGraph& b) {
    return a.layers_ == b.layers_ && a.meta_ == b.meta_;
  }

 private:
  const Shape& input_shape_of(std::size_t layer, std::size_t slot) const {
    return shapes_.at(input_index(layer, slot));
  }

  void validate() {
    index_.clear();
    shapes_.clear();
    detail::require(meta_.input_shape.size() == 3, "graph input shape must be (h, w, c)");
    for (std::size_t extent : meta_.input_shape) {
      detail::require(extent > 0, "graph input extents must be positive");
    }
    if (meta_.channel_mean) {
      detail::require(meta_.channel_mean->size() == meta_.input_shape[2],
                      "channel_mean length must equal input channels");
    }
    std::size_t input_count = 0;
    std::size_t softmax_count = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const LayerSpec& spec = layers_[i];
      detail::require(!spec.name.empty(), "layer names must be non-empty");
      detail::require(!index_.contains(spec.name), "duplicate layer name '" + spec.name + "'");
      for (const auto& input : spec.inputs) {
        detail::require(index_.contains(input), "layer '" + spec.name +
                                                    "' references undeclared input '" +
                                                    input + "'");
      }
      index_.emplace(spec.name, i);
      if (spec.kind == LayerKind::input) ++input_count;
      if (spec.kind == LayerKind::softmax) ++softmax_count;
      shapes_.push_back(propagate(i));
      const auto expected = weight_shapes(i);
      detail::require(spec.weights.size() == expected.size(),
                      "layer '" + spec.name + "' expects " + std::to_string(expected.size()) +
                          " weight tensors, lists " + std::to_string(spec.weights.size()));
    }
    detail::require(input_count == 1, "graph must contain exactly one input layer");
    detail::require(layers_.front().kind == LayerKind::input, "first layer must be the input");
    detail::require(softmax_count == 1, "graph must contain exactly one softmax layer");
    detail::require(layers_.back().kind == LayerKind::softmax, "softmax must be the last layer");
  }

  Shape propagate(std::size_t i) const {
    const LayerSpec& spec = layers_[i];
    auto arity = [&](std::size_t n) {
      detail::require(spec.inputs.size() == n, "layer '" + spec.name + "' (" +
                                                   to_string(spec.kind) + ") takes " +
                                                   std::to_string(n) + " input(s)");
    };
    auto spatial = [&](const Shape& s) {
      detail::require(s.size() == 3, "layer '" + spec.name + "' needs an (h, w, c) input");
    };
    auto hyper_is = [&]<typename H>(std::type_identity<H>) {
      detail::require(std::holds_alternative<H>(spec.hyper),
                      "layer '" + spec.name + "' carries the wrong hyperparameter block");
    };
    switch (spec.kind) {
      case LayerKind::input:
        arity(0);
        return meta_.input_shape;
      case LayerKind::conv2d: {
        arity(1);
        hyper_is(std::type_identity<ConvHyper>{});
        const Shape& in = input_shape_of(i, 0);
        spatial(in);
        const auto& h = spec.conv();
        detail::require(h.stride >= 1 && h.kernel_h >= 1 && h.kernel_w >= 1 && h.filters >= 1,
                        "conv '" + spec.name + "' has a zero hyperparameter");
        return {output_extent(in[0], h.kernel_h, h.stride, h.padding),
                output_extent(in[1], h.kernel_w, h.stride, h.padding), h.filters};
      }
      case LayerKind::max_pool: {
        arity(1);
        hyper_is(std::type_identity<PoolHyper>{});
        const Shape& in = input_shape_of(i, 0);
        spatial(in);
        const auto& h = spec.pool();
        detail::require(h.stride >= 1 && h.size >= 1, "pool '" + spec.name + "' has zero size");
        return {output_extent(in[0], h.size, h.stride, h.padding),
                output_extent(in[1], h.size, h.stride, h.padding), in[2]};
      }
      case LayerKind::zero_pad: {
        arity(1);
        hyper_is(std::type_identity<PadHyper>{});
        const Shape& in = input_shape_of(i, 0);
        spatial(in);
        const auto& p = spec.zero_pad().pad;
        return {in[0] + p[0] + p[1], in[1] + p[2] + p[3], in[2]};
      }
      case LayerKind::batchnorm:
        arity(1);
        hyper_is(std::type_identity<BatchNormHyper>{});
        detail::require(spec.batchnorm().epsilon >= 0.0, "batchnorm epsilon must be >= 0");
        return input_shape_of(i, 0);
      case LayerKind::relu:
        arity(1);
        return input_shape_of(i, 0);
      case LayerKind::softmax: {
        arity(1);
        const Shape& in = input_shape_of(i, 0);
        detail::require(in.size() == 1, "softmax '" + spec.name + "' needs a vector input");
        return in;
      }
      case LayerKind::add: {
        detail::require(spec.inputs.size() >= 2, "add '" + spec.name + "' needs >= 2 inputs");
        const Shape& first = input_shape_of(i, 0);
        for (std::size_t k = 1; k < spec.inputs.size(); ++k) {
          detail::require(input_shape_of(i, k) == first,
                          "add '" + spec.name + "' input shapes differ: " +
                              shape_string(first) + " vs " + shape_string(input_shape_of(i, k)));
        }
        return first;
      }
      case LayerKind::global_avg_pool: {
        arity(1);
        const Shape& in = input_shape_of(i, 0);
        spatial(in);
        return {in[2]};
      }
      case LayerKind::dense: {
        arity(1);
        hyper_is(std::type_identity<DenseHyper>{});
        const Shape& in = input_shape_of(i, 0);
        detail::require(in.size() == 1, "dense '" + spec.name + "' needs a vector input");
        detail::require(spec.dense().units >= 1, "dense '" + spec.name + "' has zero units");
        return {spec.dense().units};
      }
    }
    detail::fail("unhandled layer kind");
  }

  std::vector<LayerSpec> layers_;
  GraphMeta meta_;
  std::vector<Shape> shapes_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Sum of the element counts of every weight tensor the graph declares:
// conv kernels and biases, dense kernels and biases, and all four batchnorm
// vectors.
inline std::size_t parameter_count(const ModelGraph& graph) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < graph.layers().size(); ++i) {
    for (const Shape& shape : graph.weight_shapes(i)) total += element_count(shape);
  }
  return total;
}

inline std::size_t layer_parameter_count(const ModelGraph& graph, const std::string& name) {
  auto index = graph.find(name);
  detail::require(index.has_value(), "unknown layer '" + name + "'");
  std::size_t total = 0;
  for (const Shape& shape : graph.weight_shapes(*index)) total += element_count(shape);
  return total;
}

// ---------------------------------------------------------------------------
// JSON topology file.

namespace detail {

inline std::string padding_name(Padding p) { return p == Padding::same ? "same" : "valid"; }

inline Padding padding_from(const std::string& text) {
  if (text == "same") return Padding::same;
  if (text == "valid") return Padding::valid;
  fail("unknown padding mode '" + text + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const LayerSpec& spec) {
  nlohmann::json hyper = nlohmann::json::object();
  std::visit(
      [&](const auto& h) {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, ConvHyper>) {
          hyper = {{"kernel", {h.kernel_h, h.kernel_w}},
                   {"filters", h.filters},
                   {"stride", h.stride},
                   {"padding", detail::padding_name(h.padding)},
                   {"bias", h.bias}};
        } else if constexpr (std::is_same_v<H, BatchNormHyper>) {
          hyper = {{"epsilon", h.epsilon}};
        } else if constexpr (std::is_same_v<H, DenseHyper>) {
          hyper = {{"units", h.units}, {"bias", h.bias}};
        } else if constexpr (std::is_same_v<H, PoolHyper>) {
          hyper = {{"size", h.size}, {"stride", h.stride},
                   {"padding", detail::padding_name(h.padding)}};
        } else if constexpr (std::is_same_v<H, PadHyper>) {
          hyper = {{"pad", h.pad}};
        }
      },
      spec.hyper);
  return {{"name", spec.name},
          {"kind", to_string(spec.kind)},
          {"inputs", spec.inputs},
          {"hyper", hyper},
          {"weights", spec.weights}};
}

inline nlohmann::json to_json(const ModelGraph& graph) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& spec : graph.layers()) layers.push_back(to_json(spec));
  nlohmann::json meta = {{"arch", graph.meta().arch},
                         {"input_shape", graph.meta().input_shape}};
  if (graph.meta().channel_mean) meta["channel_mean"] = *graph.meta().channel_mean;
  return {{"meta", meta}, {"layers", layers}};
}

inline LayerSpec layer_from_json(const nlohmann::json& j) {
  LayerSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  spec.inputs = j.value("inputs", std::vector<std::string>{});
  spec.weights = j.value("weights", std::vector<std::string>{});
  const nlohmann::json hyper = j.value("hyper", nlohmann::json::object());
  switch (spec.kind) {
    case LayerKind::conv2d: {
      ConvHyper h;
      const auto kernel = hyper.at("kernel").get<std::vector<std::size_t>>();
      detail::require(kernel.size() == 2, "conv kernel must be [kh, kw]");
      h.kernel_h = kernel[0];
      h.kernel_w = kernel[1];
      h.filters = hyper.at("filters").get<std::size_t>();
      h.stride = hyper.value("stride", std::size_t{1});
      h.padding = detail::padding_from(hyper.value("padding", std::string("same")));
      h.bias = hyper.value("bias", true);
      spec.hyper = h;
      break;
    }
    case LayerKind::batchnorm:
      spec.hyper = BatchNormHyper{hyper.value("epsilon", 1e-3)};
      break;
    case LayerKind::dense:
      spec.hyper = DenseHyper{hyper.at("units").get<std::size_t>(), hyper.value("bias", true)};
      break;
    case LayerKind::max_pool: {
      PoolHyper h;
      h.size = hyper.at("size").get<std::size_t>();
      h.stride = hyper.value("stride", h.size);
      h.padding = detail::padding_from(hyper.value("padding", std::string("valid")));
      spec.hyper = h;
      break;
    }
    case LayerKind::zero_pad:
      spec.hyper = PadHyper{hyper.at("pad").get<std::array<std::size_t, 4>>()};
      break;
    default:
      break;
  }
  return spec;
}

inline ModelGraph graph_from_json(const nlohmann::json& j) {
  try {
    GraphMeta meta;
    const auto& m = j.at("meta");
    meta.arch = m.value("arch", std::string());
    meta.input_shape = m.at("input_shape").get<Shape>();
    if (m.contains("channel_mean")) meta.channel_mean = m.at("channel_mean").get<std::vector<float>>();
    std::vector<LayerSpec> layers;
    for (const auto& layer : j.at("layers")) layers.push_back(layer_from_json(layer));
    return ModelGraph(std::move(layers), std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    detail::fail(std::string("malformed graph JSON: ") + e.what());
  }
}

inline void save_graph(const ModelGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << to_json(graph).dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline ModelGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::fail("'" + path + "' is not valid JSON: " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace kernelscope
