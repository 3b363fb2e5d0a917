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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/intelligence.hpp"

namespace kernelscope {

struct TransplantOptions {
  // Also copy the batchnorm layer that directly consumes each named conv.
  bool include_bn = false;
};

// Batchnorm layer fed directly by `layer`, if any.
inline std::optional<std::string> batchnorm_after(const ModelGraph& graph, const std::string& layer) {
  for (const auto& spec : graph.layers()) {
    if (spec.kind == LayerKind::batchnorm && spec.inputs.size() == 1 && spec.inputs[0] == layer) {
      return spec.name;
    }
  }
  return std::nullopt;
}

// Tensor names moved when transplanting `layer`.
inline std::vector<std::string> transplanted_tensors(const ModelGraph& graph,
                                                     const std::string& layer,
                                                     const TransplantOptions& options = {}) {
  const LayerSpec& spec = graph.layer(layer);
  std::vector<std::string> names = spec.weights;
  if (options.include_bn && spec.kind == LayerKind::conv2d) {
    if (auto bn = batchnorm_after(graph, layer)) {
      const auto& extra = graph.layer(*bn).weights;
      names.insert(names.end(), extra.begin(), extra.end());
    }
  }
  return names;
}

// Copy of `dst` whose weights for the named layers are bit-copied from `src`.
// Connectivity is untouched; only tensor values move.
inline CheckpointBundle transplant(const ModelGraph& graph, const CheckpointBundle& dst,
                                   const CheckpointBundle& src,
                                   const std::vector<std::string>& layer_names,
                                   const TransplantOptions& options = {}) {
  validate_bundle(graph, dst);
  validate_bundle(graph, src);
  CheckpointBundle out = dst;
  for (const auto& layer : layer_names) {
    detail::require(graph.find(layer).has_value(), "unknown layer '" + layer + "'");
    for (const auto& name : transplanted_tensors(graph, layer, options)) {
      const Tensor& from = src.at(name);
      Tensor& to = out.tensors.at(name);
      detail::require(from.shape() == to.shape(), "shape mismatch for '" + name + "': " +
                                                      shape_string(from.shape()) + " vs " +
                                                      shape_string(to.shape()));
      to = from;
    }
  }
  return out;
}

struct SweepRow {
  std::string layer;
  std::size_t param_count = 0;     // conv weights + bias
  std::size_t param_count_bn = 0;  // plus the following batchnorm's four vectors
  double param_fraction = 0.0;     // param_count / whole-model parameter count
  double vi_delta = 0.0;
  std::array<double, kDistortionKinds> type_deltas{};
};

struct SweepResult {
  AccuracyProfile baseline;
  bool include_bn = false;
  std::vector<SweepRow> rows;
};

// For each conv layer independently: transplant that layer alone from `src`
// into `dst` and report the change in visual intelligence (overall and per
// manipulation type) relative to `dst`.
inline SweepResult transplant_sweep(const ModelGraph& graph, const CheckpointBundle& dst,
                                    const CheckpointBundle& src, const LabeledDataset& dataset,
                                    const ConditionGrid& grid,
                                    const TransplantOptions& options = {},
                                    const EvaluationOptions& eval = {}) {
  SweepResult result;
  result.include_bn = options.include_bn;
  result.baseline = evaluate_profile(graph, dst, dataset, grid, "baseline", eval);
  const double total = static_cast<double>(parameter_count(graph));
  for (std::size_t index : graph.conv_layers()) {
    const std::string& name = graph.layers()[index].name;
    SweepRow row;
    row.layer = name;
    row.param_count = layer_parameter_count(graph, name);
    row.param_count_bn = row.param_count;
    if (auto bn = batchnorm_after(graph, name)) row.param_count_bn += layer_parameter_count(graph, *bn);
    row.param_fraction = static_cast<double>(options.include_bn ? row.param_count_bn
                                                                : row.param_count) / total;
    const CheckpointBundle grafted = transplant(graph, dst, src, {name}, options);
    const AccuracyProfile profile = evaluate_profile(graph, grafted, dataset, grid, name, eval);
    row.vi_delta = profile.vi_score - result.baseline.vi_score;
    for (std::size_t t = 0; t < kDistortionKinds; ++t) {
      row.type_deltas[t] = profile.type_means[t] - result.baseline.type_means[t];
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace kernelscope
