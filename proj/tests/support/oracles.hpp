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

// Brute-force reference implementations the library is checked against. They
// favour obviousness over speed and share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kernelscope/tensor.hpp"

namespace kernelscope::testing {

// Direct six-loop convolution in double with explicitly computed "same"
// padding (extra row/column on the bottom/right).
inline Tensor conv_reference(const Tensor& x, const Tensor& w, const Tensor* b, std::size_t stride,
                             bool same) {
  const long in_h = static_cast<long>(x.dim(0)), in_w = static_cast<long>(x.dim(1));
  const long kh = static_cast<long>(w.dim(0)), kw = static_cast<long>(w.dim(1));
  const long c_in = static_cast<long>(w.dim(2)), c_out = static_cast<long>(w.dim(3));
  const long s = static_cast<long>(stride);
  long out_h, out_w, top = 0, left = 0;
  if (same) {
    out_h = (in_h + s - 1) / s;
    out_w = (in_w + s - 1) / s;
    top = std::max(0L, (out_h - 1) * s + kh - in_h) / 2;
    left = std::max(0L, (out_w - 1) * s + kw - in_w) / 2;
  } else {
    out_h = (in_h - kh) / s + 1;
    out_w = (in_w - kw) / s + 1;
  }
  Tensor out({static_cast<std::size_t>(out_h), static_cast<std::size_t>(out_w),
              static_cast<std::size_t>(c_out)});
  for (long oy = 0; oy < out_h; ++oy)
    for (long ox = 0; ox < out_w; ++ox)
      for (long co = 0; co < c_out; ++co) {
        double acc = b ? (*b)[static_cast<std::size_t>(co)] : 0.0;
        for (long ky = 0; ky < kh; ++ky)
          for (long kx = 0; kx < kw; ++kx)
            for (long ci = 0; ci < c_in; ++ci) {
              const long iy = oy * s + ky - top, ix = ox * s + kx - left;
              if (iy < 0 || ix < 0 || iy >= in_h || ix >= in_w) continue;
              acc += static_cast<double>(x.values()[static_cast<std::size_t>((iy * in_w + ix) * c_in + ci)]) *
                     w.values()[static_cast<std::size_t>(((ky * kw + kx) * c_in + ci) * c_out + co)];
            }
        out.values()[static_cast<std::size_t>((oy * out_w + ox) * c_out + co)] = static_cast<float>(acc);
      }
  return out;
}

// Symmetric (half-sample) reflection of an arbitrary index into [0, n).
inline std::size_t reflect_reference(long i, long n) {
  const long period = 2 * n;
  long m = ((i % period) + period) % period;
  if (m >= n) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

// Full 2-D Gaussian convolution (radius ceil(3 sigma), weights renormalised
// over the window) with reflect borders, clipped to [0, 1].
inline Tensor blur_reference(const Tensor& img, double sigma) {
  const long radius = static_cast<long>(std::ceil(3 * sigma));
  const long side = 2 * radius + 1;
  std::vector<double> kernel;
  double total = 0.0;
  for (long dy = -radius; dy <= radius; ++dy)
    for (long dx = -radius; dx <= radius; ++dx) {
      kernel.push_back(std::exp(-static_cast<double>(dy * dy + dx * dx) / (2 * sigma * sigma)));
      total += kernel.back();
    }
  const long h = static_cast<long>(img.dim(0)), w = static_cast<long>(img.dim(1));
  Tensor out(img.shape());
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x)
      for (std::size_t c = 0; c < img.dim(2); ++c) {
        double acc = 0.0;
        for (long dy = -radius; dy <= radius; ++dy)
          for (long dx = -radius; dx <= radius; ++dx)
            acc += kernel[static_cast<std::size_t>((dy + radius) * side + dx + radius)] / total *
                   img.at(reflect_reference(y + dy, h), reflect_reference(x + dx, w), c);
        out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c) =
            static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  return out;
}

}  // namespace kernelscope::testing
