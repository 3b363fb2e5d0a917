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
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "kernelscope/bundle.hpp"
#include "kernelscope/error.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/parallel.hpp"

namespace kernelscope {

struct PearsonResult {
  double r = 0.0;
  bool degenerate = false;  // a vector had zero variance; r is the sentinel 0
};

// Sample Pearson correlation, computed in two passes in double precision.
template <typename T>
PearsonResult pearson(std::span<const T> x, std::span<const T> y) {
  detail::require(x.size() == y.size(), "pearson: length mismatch (" + std::to_string(x.size()) +
                                            " vs " + std::to_string(y.size()) + ")");
  detail::require(x.size() >= 2, "pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

inline PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(std::span<const double>(x), std::span<const double>(y));
}

// Output-channel filters of one conv layer, each flattened in (kh, kw, c_in)
// row-major order. Biases are not part of a kernel.
struct KernelSet {
  std::string layer;
  std::size_t length = 0;
  std::vector<std::vector<float>> kernels;
};

inline KernelSet kernels_from_weights(const std::string& layer, const Tensor& weights) {
  detail::require(weights.rank() == 4, "conv weights must be (kh, kw, c_in, c_out)");
  const std::size_t c_out = weights.dim(3);
  const std::size_t length = weights.size() / c_out;
  KernelSet set{layer, length, std::vector<std::vector<float>>(c_out, std::vector<float>(length))};
  auto w = weights.values();
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t k = 0; k < c_out; ++k) set.kernels[k][i] = w[i * c_out + k];
  }
  return set;
}

inline KernelSet extract_kernels(const ModelGraph& graph, const CheckpointBundle& bundle,
                                 const std::string& layer) {
  const LayerSpec& spec = graph.layer(layer);
  detail::require(spec.kind == LayerKind::conv2d,
                  "layer '" + layer + "' is " + to_string(spec.kind) + ", not conv2d");
  return kernels_from_weights(layer, bundle.at(spec.weights.at(0)));
}

struct KernelMatch {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double r = 0.0;
  bool degenerate = false;
  friend bool operator==(const KernelMatch&, const KernelMatch&) = default;
};

// K_a x K_b correlation matrix, row-major. Kernels with zero variance get
// r = 0 against everything and are reported through `degenerate`.
struct CorrelationMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> r;
  std::vector<bool> row_degenerate;
  std::vector<bool> col_degenerate;

  double at(std::size_t i, std::size_t j) const { return r[i * cols + j]; }
  bool degenerate(std::size_t i, std::size_t j) const {
    return row_degenerate[i] || col_degenerate[j];
  }
};

namespace detail {

// Centres and scales each kernel to unit norm so correlations become dot
// products. Returns false for zero-variance kernels.
inline bool standardize(std::span<const float> v, std::vector<double>& out) {
  out.assign(v.begin(), v.end());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  double ss = 0.0;
  for (double& x : out) {
    x -= mean;
    ss += x * x;
  }
  if (ss == 0.0) return false;
  const double inv = 1.0 / std::sqrt(ss);
  for (double& x : out) x *= inv;
  return true;
}

}  // namespace detail

inline CorrelationMatrix correlation_matrix(const KernelSet& a, const KernelSet& b) {
  detail::require(a.length == b.length, "kernel length mismatch in layer '" + a.layer + "': " +
                                            std::to_string(a.length) + " vs " +
                                            std::to_string(b.length));
  detail::require(!a.kernels.empty() && !b.kernels.empty(), "kernel sets must be non-empty");
  CorrelationMatrix m;
  m.rows = a.kernels.size();
  m.cols = b.kernels.size();
  m.r.assign(m.rows * m.cols, 0.0);
  std::vector<std::vector<double>> za(m.rows), zb(m.cols);
  m.row_degenerate.resize(m.rows);
  m.col_degenerate.resize(m.cols);
  const bool too_short = a.length < 2;
  for (std::size_t i = 0; i < m.rows; ++i) {
    m.row_degenerate[i] = too_short || !detail::standardize(a.kernels[i], za[i]);
  }
  for (std::size_t j = 0; j < m.cols; ++j) {
    m.col_degenerate[j] = too_short || !detail::standardize(b.kernels[j], zb[j]);
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (m.row_degenerate[i]) continue;
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m.col_degenerate[j]) continue;
      double dot = 0.0;
      for (std::size_t k = 0; k < a.length; ++k) dot += za[i][k] * zb[j][k];
      m.r[i * m.cols + j] = std::clamp(dot, -1.0, 1.0);
    }
  }
  return m;
}

enum class Assignment { greedy, optimal };

inline std::string to_string(Assignment a) { return a == Assignment::greedy ? "greedy" : "optimal"; }

inline Assignment assignment_from_string(const std::string& text) {
  if (text == "greedy") return Assignment::greedy;
  if (text == "optimal") return Assignment::optimal;
  detail::fail("unknown assignment '" + text + "' (expected greedy or optimal)");
}

// Greedy global-maximum matching: repeatedly take the largest remaining
// entry, ties to the smallest (index_a, index_b), and retire its row and
// column. Result is sorted by index_a.
inline std::vector<KernelMatch> greedy_matching(const CorrelationMatrix& m) {
  std::vector<std::size_t> order(m.r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return m.r[x] > m.r[y]; });
  std::vector<bool> row_used(m.rows), col_used(m.cols);
  std::vector<KernelMatch> matches;
  const std::size_t target = std::min(m.rows, m.cols);
  for (std::size_t flat : order) {
    const std::size_t i = flat / m.cols;
    const std::size_t j = flat % m.cols;
    if (row_used[i] || col_used[j]) continue;
    row_used[i] = col_used[j] = true;
    matches.push_back({i, j, m.r[flat], m.degenerate(i, j)});
    if (matches.size() == target) break;
  }
  std::sort(matches.begin(), matches.end(),
            [](const KernelMatch& x, const KernelMatch& y) { return x.index_a < y.index_a; });
  return matches;
}

// Maximum-total-correlation assignment (Hungarian algorithm with
// potentials, O(n^2 m)). Handles rectangular matrices by assigning every row
// of the smaller side.
inline std::vector<KernelMatch> optimal_matching(const CorrelationMatrix& m) {
  const bool transpose = m.rows > m.cols;
  const std::size_t n = transpose ? m.cols : m.rows;  // rows to assign
  const std::size_t k = transpose ? m.rows : m.cols;  // columns available
  auto cost = [&](std::size_t i, std::size_t j) {
    return -(transpose ? m.at(j, i) : m.at(i, j));
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<bool> used(k + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<KernelMatch> matches;
  for (std::size_t j = 1; j <= k; ++j) {
    if (p[j] == 0) continue;
    const std::size_t row = p[j] - 1;
    const std::size_t col = j - 1;
    const std::size_t ia = transpose ? col : row;
    const std::size_t ib = transpose ? row : col;
    matches.push_back({ia, ib, m.at(ia, ib), m.degenerate(ia, ib)});
  }
  std::sort(matches.begin(), matches.end(),
            [](const KernelMatch& x, const KernelMatch& y) { return x.index_a < y.index_a; });
  return matches;
}

inline std::vector<KernelMatch> align_kernels(const KernelSet& a, const KernelSet& b,
                                              Assignment assignment = Assignment::greedy) {
  const CorrelationMatrix m = correlation_matrix(a, b);
  return assignment == Assignment::greedy ? greedy_matching(m) : optimal_matching(m);
}

struct LayerSimilarity {
  std::string layer;
  std::vector<KernelMatch> matching;
  double mean_r = 0.0;
  double std_r = 0.0;  // sample standard deviation of the matched r values
  std::size_t degenerate = 0;
};

inline LayerSimilarity summarize_layer(std::string layer, std::vector<KernelMatch> matching) {
  LayerSimilarity out;
  out.layer = std::move(layer);
  out.matching = std::move(matching);
  const double n = static_cast<double>(out.matching.size());
  double sum = 0.0;
  for (const auto& m : out.matching) {
    sum += m.r;
    if (m.degenerate) ++out.degenerate;
  }
  out.mean_r = sum / n;
  if (out.matching.size() > 1) {
    double ss = 0.0;
    for (const auto& m : out.matching) ss += (m.r - out.mean_r) * (m.r - out.mean_r);
    out.std_r = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

inline LayerSimilarity layer_similarity(const KernelSet& a, const KernelSet& b,
                                        Assignment assignment = Assignment::greedy) {
  return summarize_layer(a.layer, align_kernels(a, b, assignment));
}

struct SimilarityReport {
  std::string id_a;
  std::string id_b;
  Assignment assignment = Assignment::greedy;
  std::vector<LayerSimilarity> layers;  // conv layers in graph order
  double network_similarity = 0.0;      // unweighted mean of layer means
};

struct SimilarityOptions {
  Assignment assignment = Assignment::greedy;
  std::size_t threads = 1;
};

// Intrinsic similarity of two bundles of the same architecture: per conv
// layer, align kernels one-to-one and average the matched correlations; then
// average the layer means. Dense and batchnorm weights do not participate.
inline SimilarityReport network_similarity(const ModelGraph& graph_a, const CheckpointBundle& a,
                                           const ModelGraph& graph_b, const CheckpointBundle& b,
                                           const SimilarityOptions& options = {},
                                           std::string id_a = "A", std::string id_b = "B") {
  detail::require(graph_a == graph_b, "architecture mismatch: graphs differ");
  validate_bundle(graph_a, a);
  validate_bundle(graph_b, b);
  const auto convs = graph_a.conv_layers();
  detail::require(!convs.empty(), "architecture has no conv layers");
  SimilarityReport report;
  report.id_a = std::move(id_a);
  report.id_b = std::move(id_b);
  report.assignment = options.assignment;
  report.layers.resize(convs.size());
  parallel_for(convs.size(), options.threads, [&](std::size_t k) {
    const std::string& name = graph_a.layers()[convs[k]].name;
    report.layers[k] = layer_similarity(extract_kernels(graph_a, a, name),
                                        extract_kernels(graph_b, b, name), options.assignment);
  });
  double sum = 0.0;
  for (const auto& layer : report.layers) sum += layer.mean_r;
  report.network_similarity = sum / static_cast<double>(report.layers.size());
  return report;
}

inline SimilarityReport network_similarity(const ModelGraph& graph, const CheckpointBundle& a,
                                           const CheckpointBundle& b,
                                           const SimilarityOptions& options = {},
                                           std::string id_a = "A", std::string id_b = "B") {
  return network_similarity(graph, a, graph, b, options, std::move(id_a), std::move(id_b));
}

struct LayerProfilePoint {
  std::string layer;
  double mean_r = 0.0;
  double std_r = 0.0;
};

inline std::vector<LayerProfilePoint> layer_profile(const SimilarityReport& report) {
  std::vector<LayerProfilePoint> series;
  for (const auto& layer : report.layers) series.push_back({layer.layer, layer.mean_r, layer.std_r});
  return series;
}

}  // namespace kernelscope
