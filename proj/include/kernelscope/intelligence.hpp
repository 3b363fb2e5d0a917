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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/dataset.hpp"
#include "kernelscope/distort.hpp"
#include "kernelscope/forward.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/parallel.hpp"
#include "kernelscope/similarity.hpp"

namespace kernelscope {

struct ConditionAccuracy {
  std::string id;
  DistortionKind kind = DistortionKind::contrast;
  double parameter = 0.0;
  double accuracy = 0.0;
};

// Accuracy of one network over the condition grid, in grid order.
struct AccuracyProfile {
  std::string network_id;
  std::vector<ConditionAccuracy> conditions;
  std::array<double, kDistortionKinds> type_means{};  // indexed by DistortionKind
  double vi_score = 0.0;
};

// Unweighted mean of the per-type means.
inline double visual_intelligence(const AccuracyProfile& profile) {
  double sum = 0.0;
  for (double m : profile.type_means) sum += m;
  return sum / static_cast<double>(kDistortionKinds);
}

// Recomputes type_means and vi_score from the condition accuracies. Every one
// of the eight types must be present.
inline void finalize_profile(AccuracyProfile& profile) {
  std::array<double, kDistortionKinds> sums{};
  std::array<std::size_t, kDistortionKinds> counts{};
  for (const auto& c : profile.conditions) {
    detail::require(c.accuracy >= 0.0 && c.accuracy <= 1.0,
                    "accuracy for '" + c.id + "' is outside [0, 1]");
    const auto t = static_cast<std::size_t>(c.kind);
    sums[t] += c.accuracy;
    ++counts[t];
  }
  for (std::size_t t = 0; t < kDistortionKinds; ++t) {
    detail::require(counts[t] > 0, "profile '" + profile.network_id + "' has no " +
                                       to_string(static_cast<DistortionKind>(t)) +
                                       " conditions");
    profile.type_means[t] = sums[t] / static_cast<double>(counts[t]);
  }
  profile.vi_score = visual_intelligence(profile);
}

struct EvaluationOptions {
  std::size_t threads = 1;
};

// Top-1 accuracy of the network on every grid condition. Noise for image i
// under condition k is seeded by derive_stream_seed(grid seed, k, i); all
// identity conditions share one clean pass.
inline AccuracyProfile evaluate_profile(const ModelGraph& graph, const CheckpointBundle& bundle,
                                        const LabeledDataset& dataset, const ConditionGrid& grid,
                                        std::string network_id = "network",
                                        const EvaluationOptions& options = {}) {
  validate_bundle(graph, bundle);
  validate_dataset(dataset);
  detail::require(dataset.size() > 0, "dataset is empty");
  Shape image_shape(dataset.images.shape().begin() + 1, dataset.images.shape().end());
  detail::require(image_shape == graph.meta().input_shape,
                  "dataset images " + shape_string(image_shape) + " do not match graph input " +
                      shape_string(graph.meta().input_shape));
  const std::size_t n = dataset.size();

  std::vector<Tensor> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = dataset.images.slice(i);

  auto count_correct = [&](const std::function<Tensor(std::size_t)>& input) {
    std::vector<unsigned char> hit(n, 0);
    parallel_for(n, options.threads, [&](std::size_t i) {
      const Tensor probs = forward_image(graph, bundle, input(i));
      hit[i] = argmax(probs.values()) == dataset.labels[i] ? 1 : 0;
    });
    std::size_t correct = 0;
    for (auto h : hit) correct += h;
    return static_cast<double>(correct) / static_cast<double>(n);
  };

  std::optional<double> clean;
  AccuracyProfile profile;
  profile.network_id = std::move(network_id);
  for (const Condition& condition : grid.conditions) {
    double accuracy = 0.0;
    if (condition.identity) {
      if (!clean) clean = count_correct([&](std::size_t i) -> Tensor { return images[i]; });
      accuracy = *clean;
    } else {
      for (const DistortionSpec& variant : condition.variants) {
        accuracy += count_correct(
            [&](std::size_t i) { return apply_distortion(images[i], variant, i); });
      }
      accuracy /= static_cast<double>(condition.variants.size());
    }
    profile.conditions.push_back({condition.id, condition.kind, condition.parameter, accuracy});
  }
  finalize_profile(profile);
  return profile;
}

inline std::vector<double> accuracy_vector(const AccuracyProfile& profile) {
  std::vector<double> out;
  out.reserve(profile.conditions.size());
  for (const auto& c : profile.conditions) out.push_back(c.accuracy);
  return out;
}

// Pearson correlation of the full per-condition accuracy vectors. A constant
// profile yields 0.
inline double compatibility(const AccuracyProfile& a, const AccuracyProfile& b) {
  detail::require(a.conditions.size() == b.conditions.size(),
                  "grid mismatch: " + std::to_string(a.conditions.size()) + " vs " +
                      std::to_string(b.conditions.size()) + " conditions");
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    detail::require(a.conditions[i].id == b.conditions[i].id,
                    "grid mismatch at position " + std::to_string(i) + ": '" +
                        a.conditions[i].id + "' vs '" + b.conditions[i].id + "'");
  }
  return pearson(accuracy_vector(a), accuracy_vector(b)).r;
}

enum class MatrixKind { vic, is, diff };

inline std::string to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::vic: return "VIC";
    case MatrixKind::is: return "IS";
    case MatrixKind::diff: return "DIFF";
  }
  return "?";
}

inline MatrixKind matrix_kind_from_string(const std::string& text) {
  if (text == "VIC") return MatrixKind::vic;
  if (text == "IS") return MatrixKind::is;
  if (text == "DIFF") return MatrixKind::diff;
  detail::fail("unknown matrix kind '" + text + "'");
}

// Labelled symmetric n x n matrix, row-major.
struct PairMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;
  MatrixKind kind = MatrixKind::vic;

  std::size_t size() const noexcept { return ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values.at(i * ids.size() + j); }
  double& at(std::size_t i, std::size_t j) { return values.at(i * ids.size() + j); }
};

// Fills a symmetric matrix from measure(i, j) evaluated on the upper triangle;
// the diagonal is 1.
inline PairMatrix pairwise_matrix(std::vector<std::string> ids, MatrixKind kind,
                                  const std::function<double(std::size_t, std::size_t)>& measure,
                                  std::size_t threads = 1) {
  detail::require(ids.size() >= 2, "pairwise matrix needs at least two items");
  PairMatrix m;
  const std::size_t n = ids.size();
  m.ids = std::move(ids);
  m.kind = kind;
  m.values.assign(n * n, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    m.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double v = measure(i, j);
    m.values[i * n + j] = v;
    m.values[j * n + i] = v;
  });
  return m;
}

inline PairMatrix compatibility_matrix(const std::vector<AccuracyProfile>& profiles,
                                       std::size_t threads = 1) {
  std::vector<std::string> ids;
  for (const auto& p : profiles) ids.push_back(p.network_id);
  return pairwise_matrix(
      std::move(ids), MatrixKind::vic,
      [&](std::size_t i, std::size_t j) { return compatibility(profiles[i], profiles[j]); },
      threads);
}

inline PairMatrix similarity_matrix(const ModelGraph& graph,
                                    const std::vector<CheckpointBundle>& bundles,
                                    std::vector<std::string> ids,
                                    const SimilarityOptions& options = {}) {
  detail::require(ids.size() == bundles.size(), "one id per bundle required");
  SimilarityOptions inner = options;
  inner.threads = 1;
  return pairwise_matrix(
      std::move(ids), MatrixKind::is,
      [&](std::size_t i, std::size_t j) {
        return network_similarity(graph, bundles[i], bundles[j], inner).network_similarity;
      },
      options.threads);
}

// DIFF = VIC - IS. Near 0: the measures agree; near -1: similar weights but
// different behaviour; near +1: different weights but similar behaviour.
inline PairMatrix difference_matrix(const PairMatrix& vic, const PairMatrix& is) {
  detail::require(vic.kind == MatrixKind::vic, "first operand must be a VIC matrix");
  detail::require(is.kind == MatrixKind::is, "second operand must be an IS matrix");
  detail::require(vic.ids == is.ids, "VIC and IS matrices list different ids or orders");
  detail::require(vic.values.size() == is.values.size(), "VIC and IS sizes differ");
  PairMatrix out;
  out.ids = vic.ids;
  out.kind = MatrixKind::diff;
  out.values.resize(vic.values.size());
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = vic.values[k] - is.values[k];
  return out;
}

}  // namespace kernelscope
