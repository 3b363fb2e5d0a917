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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kernelscope/error.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/tensor.hpp"

// Single-image layer kernels. Spatial tensors are (h, w, c); vectors are (d).
namespace kernelscope::ops {

// Cross-correlation with (kh, kw, c_in, c_out) weights. "same" padding gives
// ceil(in / stride) outputs with any odd padding on the bottom/right.
inline Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor* bias,
                     std::size_t stride, Padding padding) {
  detail::require(input.rank() == 3, "conv2d input must be (h, w, c)");
  detail::require(weights.rank() == 4, "conv2d weights must be (kh, kw, c_in, c_out)");
  detail::require(stride >= 1, "conv2d stride must be >= 1");
  const std::size_t in_h = input.dim(0), in_w = input.dim(1), c_in = input.dim(2);
  const std::size_t kh = weights.dim(0), kw = weights.dim(1), c_out = weights.dim(3);
  detail::require(weights.dim(2) == c_in, "conv2d channel mismatch: input has " +
                                              std::to_string(c_in) + ", weights expect " +
                                              std::to_string(weights.dim(2)));
  if (bias != nullptr) {
    detail::require(bias->shape() == Shape{c_out}, "conv2d bias must be (c_out)");
  }
  const std::size_t out_h = output_extent(in_h, kh, stride, padding);
  const std::size_t out_w = output_extent(in_w, kw, stride, padding);
  const std::size_t pad_top = leading_pad(in_h, kh, stride, padding);
  const std::size_t pad_left = leading_pad(in_w, kw, stride, padding);

  Tensor out({out_h, out_w, c_out});
  const float* x = input.values().data();
  const float* w = weights.values().data();
  float* y = out.values().data();
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      float* acc = y + (oy * out_w + ox) * c_out;
      if (bias != nullptr) std::copy_n(bias->values().data(), c_out, acc);
      for (std::size_t ky = 0; ky < kh; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                  static_cast<std::ptrdiff_t>(pad_top);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in_h)) continue;
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                    static_cast<std::ptrdiff_t>(pad_left);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in_w)) continue;
          const float* pixel = x + (static_cast<std::size_t>(iy) * in_w +
                                    static_cast<std::size_t>(ix)) * c_in;
          const float* tap = w + (ky * kw + kx) * c_in * c_out;
          for (std::size_t ci = 0; ci < c_in; ++ci) {
            const float v = pixel[ci];
            const float* row = tap + ci * c_out;
            for (std::size_t co = 0; co < c_out; ++co) acc[co] += v * row[co];
          }
        }
      }
    }
  }
  return out;
}

// y = gamma * (x - mean) / sqrt(var + epsilon) + beta over the last axis.
inline Tensor batchnorm_inference(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                                  const Tensor& moving_mean, const Tensor& moving_var,
                                  double epsilon) {
  detail::require(x.rank() >= 1, "batchnorm input must have a channel axis");
  const std::size_t c = x.shape().back();
  for (const Tensor* p : {&gamma, &beta, &moving_mean, &moving_var}) {
    detail::require(p->shape() == Shape{c}, "batchnorm parameter length must equal channels");
  }
  for (float v : moving_var.values()) {
    detail::require(v >= 0.0f, "batchnorm moving variance must be non-negative");
  }
  std::vector<double> scale(c);
  std::vector<double> shift(c);
  for (std::size_t k = 0; k < c; ++k) {
    const double denom = std::sqrt(static_cast<double>(moving_var[k]) + epsilon);
    detail::require(denom > 0.0, "batchnorm variance + epsilon is zero");
    scale[k] = gamma[k] / denom;
    shift[k] = beta[k];
  }
  Tensor out = x;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t k = i % c;
    v[i] = static_cast<float>(scale[k] * (static_cast<double>(v[i]) - moving_mean[k]) + shift[k]);
  }
  return out;
}

inline Tensor relu(Tensor x) {
  for (float& v : x.values()) v = std::max(v, 0.0f);
  return x;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require(a.shape() == b.shape(), "add: shape mismatch " + shape_string(a.shape()) +
                                              " vs " + shape_string(b.shape()));
  Tensor out = a;
  auto o = out.values();
  auto y = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
  return out;
}

inline Tensor global_avg_pool(const Tensor& x) {
  detail::require(x.rank() == 3, "global_avg_pool input must be (h, w, c)");
  const std::size_t hw = x.dim(0) * x.dim(1);
  const std::size_t c = x.dim(2);
  std::vector<double> sums(c, 0.0);
  auto v = x.values();
  for (std::size_t p = 0; p < hw; ++p) {
    for (std::size_t k = 0; k < c; ++k) sums[k] += v[p * c + k];
  }
  Tensor out({c});
  for (std::size_t k = 0; k < c; ++k) out[k] = static_cast<float>(sums[k] / static_cast<double>(hw));
  return out;
}

// x . W + b with W of shape (d_in, d_out).
inline Tensor dense(const Tensor& x, const Tensor& weights, const Tensor* bias) {
  detail::require(x.rank() == 1, "dense input must be a vector");
  detail::require(weights.rank() == 2 && weights.dim(0) == x.size(),
                  "dense: weight rows must equal input length");
  const std::size_t d_out = weights.dim(1);
  if (bias != nullptr) detail::require(bias->shape() == Shape{d_out}, "dense bias must be (d_out)");
  std::vector<double> acc(d_out, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    const float* row = weights.values().data() + i * d_out;
    for (std::size_t j = 0; j < d_out; ++j) acc[j] += v * row[j];
  }
  Tensor out({d_out});
  for (std::size_t j = 0; j < d_out; ++j) {
    out[j] = static_cast<float>(acc[j] + (bias != nullptr ? (*bias)[j] : 0.0f));
  }
  return out;
}

inline Tensor softmax(const Tensor& logits) {
  detail::require(logits.rank() == 1, "softmax input must be a vector");
  auto v = logits.values();
  const float peak = *std::max_element(v.begin(), v.end());
  std::vector<double> e(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp(static_cast<double>(v[i]) - peak);
    total += e[i];
  }
  Tensor out(logits.shape());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(e[i] / total);
  return out;
}

// Max pooling; padded positions are ignored rather than treated as zero.
inline Tensor max_pool(const Tensor& x, std::size_t size, std::size_t stride, Padding padding) {
  detail::require(x.rank() == 3, "max_pool input must be (h, w, c)");
  const std::size_t in_h = x.dim(0), in_w = x.dim(1), c = x.dim(2);
  const std::size_t out_h = output_extent(in_h, size, stride, padding);
  const std::size_t out_w = output_extent(in_w, size, stride, padding);
  const std::size_t pad_top = leading_pad(in_h, size, stride, padding);
  const std::size_t pad_left = leading_pad(in_w, size, stride, padding);
  Tensor out({out_h, out_w, c}, -std::numeric_limits<float>::infinity());
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      for (std::size_t ky = 0; ky < size; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                  static_cast<std::ptrdiff_t>(pad_top);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in_h)) continue;
        for (std::size_t kx = 0; kx < size; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                    static_cast<std::ptrdiff_t>(pad_left);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in_w)) continue;
          for (std::size_t k = 0; k < c; ++k) {
            float& slot = out.at(oy, ox, k);
            slot = std::max(slot, x.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), k));
          }
        }
      }
    }
  }
  return out;
}

inline Tensor zero_pad(const Tensor& x, const std::array<std::size_t, 4>& pad) {
  detail::require(x.rank() == 3, "zero_pad input must be (h, w, c)");
  const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
  Tensor out({h + pad[0] + pad[1], w + pad[2] + pad[3], c});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t xx = 0; xx < w; ++xx) {
      for (std::size_t k = 0; k < c; ++k) out.at(y + pad[0], xx + pad[2], k) = x.at(y, xx, k);
    }
  }
  return out;
}

}  // namespace kernelscope::ops
