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

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kernelscope/error.hpp"

namespace kernelscope {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

// Dense row-major float32 array. Images are (h, w, c) or (n, h, w, c);
// convolution weights (kh, kw, c_in, c_out); dense weights (d_in, d_out).
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape, float fill = 0.0f)
      : shape_(std::move(shape)), data_(element_count(shape_), fill) {
    check_extents();
  }

  Tensor(Shape shape, std::vector<float> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    check_extents();
    detail::require(data_.size() == element_count(shape_),
                    "tensor data length " + std::to_string(data_.size()) +
                        " does not match shape " + shape_string(shape_));
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  float& operator[](std::size_t i) noexcept { return data_[i]; }
  float operator[](std::size_t i) const noexcept { return data_[i]; }

  // Element access for rank-3 (h, w, c) tensors.
  float& at(std::size_t y, std::size_t x, std::size_t c) noexcept {
    return data_[(y * shape_[1] + x) * shape_[2] + c];
  }
  float at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return data_[(y * shape_[1] + x) * shape_[2] + c];
  }

  bool all_finite() const noexcept {
    for (float v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  // Copy of item `index` along the leading axis, e.g. one image of a batch.
  Tensor slice(std::size_t index) const {
    detail::require(rank() >= 1 && index < shape_[0], "slice out of range");
    Shape inner(shape_.begin() + 1, shape_.end());
    const std::size_t stride = element_count(inner);
    auto first = data_.begin() + static_cast<std::ptrdiff_t>(index * stride);
    return Tensor(std::move(inner),
                  std::vector<float>(first, first + static_cast<std::ptrdiff_t>(stride)));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  void check_extents() const {
    for (std::size_t extent : shape_) {
      detail::require(extent > 0, "tensor extents must be positive, got " +
                                      shape_string(shape_));
    }
  }

  Shape shape_;
  std::vector<float> data_;
};

// Stacks equally shaped tensors along a new leading axis.
inline Tensor stack(std::span<const Tensor> items) {
  detail::require(!items.empty(), "cannot stack zero tensors");
  Shape shape = items.front().shape();
  std::vector<float> data;
  data.reserve(items.size() * items.front().size());
  for (const Tensor& item : items) {
    detail::require(item.shape() == shape, "stack: shape mismatch");
    data.insert(data.end(), item.data().begin(), item.data().end());
  }
  shape.insert(shape.begin(), items.size());
  return Tensor(std::move(shape), std::move(data));
}

// Bitwise comparison; distinguishes -0.0 from 0.0 and compares NaN payloads.
inline bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(x[i]) != std::bit_cast<std::uint32_t>(y[i]))
      return false;
  }
  return true;
}

}  // namespace kernelscope
