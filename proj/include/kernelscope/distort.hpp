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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "kernelscope/error.hpp"
#include "kernelscope/rng.hpp"
#include "kernelscope/tensor.hpp"

namespace kernelscope {

// The eight manipulation types, in the order used for per-type aggregation.
enum class DistortionKind {
  contrast,
  illuminant,
  blur,
  gamma,
  salt_pepper,
  gaussian_noise,
  speckle,
  poisson,
};

inline constexpr std::size_t kDistortionKinds = 8;

inline constexpr std::array<DistortionKind, kDistortionKinds> kAllDistortionKinds = {
    DistortionKind::contrast,    DistortionKind::illuminant,     DistortionKind::blur,
    DistortionKind::gamma,       DistortionKind::salt_pepper,    DistortionKind::gaussian_noise,
    DistortionKind::speckle,     DistortionKind::poisson};

inline std::string to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::contrast: return "contrast";
    case DistortionKind::illuminant: return "illuminant";
    case DistortionKind::blur: return "blur";
    case DistortionKind::gamma: return "gamma";
    case DistortionKind::salt_pepper: return "salt_pepper";
    case DistortionKind::gaussian_noise: return "gaussian_noise";
    case DistortionKind::speckle: return "speckle";
    case DistortionKind::poisson: return "poisson";
  }
  return "?";
}

inline DistortionKind distortion_kind_from_string(const std::string& text) {
  for (DistortionKind kind : kAllDistortionKinds) {
    if (to_string(kind) == text) return kind;
  }
  detail::fail("unknown distortion type '" + text + "'");
}

struct Contrast { double percent = 100.0; };
struct Illuminant { std::array<double, 3> gains{1.0, 1.0, 1.0}; };
struct Blur { double sigma = 0.0; };
struct Gamma { double exponent = 1.0; };
struct SaltPepper { double density = 0.0; double salt_fraction = 0.5; };
struct GaussianNoise { double sigma = 0.0; };
struct Speckle { double sigma = 0.0; };
struct Poisson { double scale = 255.0; };

using DistortionParams =
    std::variant<Contrast, Illuminant, Blur, Gamma, SaltPepper, GaussianNoise, Speckle, Poisson>;

// One manipulation instance. Noise kinds draw from a stream seeded with
// derive_stream_seed(global_seed, condition_index, image_index).
struct DistortionSpec {
  DistortionParams params;
  std::uint64_t global_seed = 0;
  std::uint64_t condition_index = 0;

  DistortionKind kind() const noexcept { return static_cast<DistortionKind>(params.index()); }
};

inline void validate_params(const DistortionParams& params) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Contrast>) {
          detail::require(p.percent >= 0.0 && p.percent <= 100.0, "contrast c must be in [0, 100]");
        } else if constexpr (std::is_same_v<P, Illuminant>) {
          for (double g : p.gains) detail::require(g >= 0.0, "illuminant gains must be >= 0");
        } else if constexpr (std::is_same_v<P, Blur>) {
          detail::require(p.sigma >= 0.0, "blur sigma must be >= 0");
        } else if constexpr (std::is_same_v<P, Gamma>) {
          detail::require(p.exponent > 0.0, "gamma must be > 0");
        } else if constexpr (std::is_same_v<P, SaltPepper>) {
          detail::require(p.density >= 0.0 && p.density <= 1.0, "salt & pepper p must be in [0, 1]");
          detail::require(p.salt_fraction >= 0.0 && p.salt_fraction <= 1.0,
                          "salt fraction must be in [0, 1]");
        } else if constexpr (std::is_same_v<P, GaussianNoise> || std::is_same_v<P, Speckle>) {
          detail::require(p.sigma >= 0.0, "noise sigma must be >= 0");
        } else if constexpr (std::is_same_v<P, Poisson>) {
          detail::require(p.scale >= 1.0, "poisson scale must be >= 1");
        }
      },
      params);
}

namespace detail {

inline void require_image(const Tensor& img) {
  require(img.rank() == 3, "distortions expect an (h, w, c) image");
}

inline float clip01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

// Half-sample symmetric reflection of index i into [0, n).
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return m < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(m)
                                            : static_cast<std::size_t>(period - 1 - m);
}

}  // namespace detail

// out = (c / 100) * I + (1 - c / 100) / 2
inline Tensor apply_contrast(const Tensor& img, double percent) {
  detail::require_image(img);
  validate_params(Contrast{percent});
  const double a = percent / 100.0;
  const double b = (1.0 - a) / 2.0;
  Tensor out = img;
  for (float& v : out.values()) v = static_cast<float>(a * v + b);
  return out;
}

// Channel i scaled by gains[i], clipped to [0, 1].
inline Tensor apply_illuminant(const Tensor& img, const std::array<double, 3>& gains) {
  detail::require_image(img);
  detail::require(img.dim(2) == 3, "illuminant expects three channels");
  validate_params(Illuminant{gains});
  Tensor out = img;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = detail::clip01(v[i] * gains[i % 3]);
  return out;
}

// Normalized 1-D Gaussian taps over [-ceil(3 sigma), ceil(3 sigma)].
inline std::vector<double> gaussian_taps(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
    const double w = std::exp(-static_cast<double>(d * d) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(d + radius)] = w;
    total += w;
  }
  for (double& w : taps) w /= total;
  return taps;
}

// Per-channel convolution with the truncated, renormalized 2-D Gaussian,
// reflect padding at the borders. The 2-D kernel is separable, so it is
// applied as a vertical then a horizontal pass. sigma = 0 is the identity.
inline Tensor apply_blur(const Tensor& img, double sigma) {
  detail::require_image(img);
  validate_params(Blur{sigma});
  if (sigma == 0.0) return img;
  const auto taps = gaussian_taps(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const std::size_t h = img.dim(0), w = img.dim(1), c = img.dim(2);

  std::vector<double> vertical(img.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t k = 0; k < c; ++k) {
        double acc = 0.0;
        for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
          const std::size_t sy = detail::reflect_index(static_cast<std::ptrdiff_t>(y) + d, h);
          acc += taps[static_cast<std::size_t>(d + radius)] * img.at(sy, x, k);
        }
        vertical[(y * w + x) * c + k] = acc;
      }
    }
  }
  Tensor out(img.shape());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t k = 0; k < c; ++k) {
        double acc = 0.0;
        for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
          const std::size_t sx = detail::reflect_index(static_cast<std::ptrdiff_t>(x) + d, w);
          acc += taps[static_cast<std::size_t>(d + radius)] * vertical[(y * w + sx) * c + k];
        }
        out.at(y, x, k) = detail::clip01(acc);
      }
    }
  }
  return out;
}

// out = I ^ gamma
inline Tensor apply_gamma(const Tensor& img, double exponent) {
  detail::require_image(img);
  validate_params(Gamma{exponent});
  Tensor out = img;
  if (exponent == 1.0) return out;
  for (float& v : out.values()) v = static_cast<float>(std::pow(static_cast<double>(v), exponent));
  return out;
}

// Each pixel location is altered with probability `density`; an altered
// pixel becomes white (all channels 1) with probability `salt_fraction`,
// otherwise black. Two uniforms per location: alter?, then salt?
inline Tensor apply_salt_pepper(const Tensor& img, double density, double salt_fraction,
                                Xoshiro256pp& rng) {
  detail::require_image(img);
  validate_params(SaltPepper{density, salt_fraction});
  Tensor out = img;
  if (density == 0.0) return out;
  const std::size_t c = img.dim(2);
  auto v = out.values();
  for (std::size_t p = 0; p < img.dim(0) * img.dim(1); ++p) {
    if (rng.uniform() >= density) continue;
    const float value = rng.uniform() < salt_fraction ? 1.0f : 0.0f;
    std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(p * c), c, value);
  }
  return out;
}

// out = clip(I + n), n ~ N(0, sigma^2) per element.
inline Tensor apply_gaussian_noise(const Tensor& img, double sigma, Xoshiro256pp& rng) {
  detail::require_image(img);
  validate_params(GaussianNoise{sigma});
  Tensor out = img;
  if (sigma == 0.0) return out;
  for (float& v : out.values()) v = detail::clip01(v + sigma * rng.normal());
  return out;
}

// out = clip(I * (1 + n)), n ~ N(0, sigma^2) per element.
inline Tensor apply_speckle(const Tensor& img, double sigma, Xoshiro256pp& rng) {
  detail::require_image(img);
  validate_params(Speckle{sigma});
  Tensor out = img;
  if (sigma == 0.0) return out;
  for (float& v : out.values()) v = detail::clip01(v * (1.0 + sigma * rng.normal()));
  return out;
}

// out = clip(Poisson(I * scale) / scale), sampled with Knuth's method.
inline Tensor apply_poisson(const Tensor& img, double scale, Xoshiro256pp& rng) {
  detail::require_image(img);
  validate_params(Poisson{scale});
  Tensor out = img;
  for (float& v : out.values()) {
    v = detail::clip01(static_cast<double>(rng.poisson(static_cast<double>(v) * scale)) / scale);
  }
  return out;
}

// Applies `spec` to image number `image_index`, seeding noise kinds from
// (global seed, condition index, image index).
inline Tensor apply_distortion(const Tensor& img, const DistortionSpec& spec,
                               std::uint64_t image_index) {
  Xoshiro256pp rng(derive_stream_seed(spec.global_seed, spec.condition_index, image_index));
  return std::visit(
      [&](const auto& p) -> Tensor {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Contrast>) return apply_contrast(img, p.percent);
        else if constexpr (std::is_same_v<P, Illuminant>) return apply_illuminant(img, p.gains);
        else if constexpr (std::is_same_v<P, Blur>) return apply_blur(img, p.sigma);
        else if constexpr (std::is_same_v<P, Gamma>) return apply_gamma(img, p.exponent);
        else if constexpr (std::is_same_v<P, SaltPepper>)
          return apply_salt_pepper(img, p.density, p.salt_fraction, rng);
        else if constexpr (std::is_same_v<P, GaussianNoise>)
          return apply_gaussian_noise(img, p.sigma, rng);
        else if constexpr (std::is_same_v<P, Speckle>) return apply_speckle(img, p.sigma, rng);
        else return apply_poisson(img, p.scale, rng);
      },
      spec.params);
}

// ---------------------------------------------------------------------------
// Condition grid.

// One grid slot. Illuminant ratios below 1 expand into three variants (one
// channel attenuated at a time) whose accuracies are averaged; every other
// slot has a single variant.
struct Condition {
  std::string id;  // e.g. "contrast/15"
  DistortionKind kind = DistortionKind::contrast;
  double parameter = 0.0;
  bool identity = false;
  std::vector<DistortionSpec> variants;
};

struct ConditionGrid {
  std::uint64_t global_seed = 0;
  std::vector<Condition> conditions;

  std::size_t size() const noexcept { return conditions.size(); }
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& c : conditions) out.push_back(c.id);
    return out;
  }
};

// Shortest round-tripping text for grid parameters (0.05, 1, 255, ...).
inline std::string format_parameter(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

inline constexpr double kContrastLevels[] = {1, 5, 15, 30, 50, 75, 100};
inline constexpr double kIlluminantRatios[] = {0.05, 0.25, 0.50, 0.75, 1.00};
inline constexpr double kGammaLevels[] = {0.3, 0.8, 1.0, 1.2, 3.0};
inline constexpr double kBlurSigmas[] = {0.0, 0.5, 1.0, 1.5};
inline constexpr double kNoisePercents[] = {0, 1, 5, 10};
inline constexpr double kPoissonScale = 255.0;
inline constexpr double kSaltFraction = 0.5;

// The 34-condition evaluation grid, in order: contrast (7), illuminant (5),
// gamma (5), blur (4), salt & pepper (4), gaussian (4), speckle (4),
// poisson (1). Noise percentages p map to density p/100 (salt fraction 0.5)
// and sigma p/100.
inline ConditionGrid build_condition_grid(std::uint64_t global_seed) {
  ConditionGrid grid;
  grid.global_seed = global_seed;
  auto add = [&](DistortionKind kind, double parameter, bool identity,
                 std::vector<DistortionParams> variants) {
    Condition c;
    c.id = to_string(kind) + "/" + format_parameter(parameter);
    c.kind = kind;
    c.parameter = parameter;
    c.identity = identity;
    for (auto& params : variants) {
      c.variants.push_back({std::move(params), global_seed, grid.conditions.size()});
    }
    grid.conditions.push_back(std::move(c));
  };
  for (double c : kContrastLevels) add(DistortionKind::contrast, c, c == 100, {Contrast{c}});
  for (double r : kIlluminantRatios) {
    if (r == 1.0) {
      add(DistortionKind::illuminant, r, true, {Illuminant{{1, 1, 1}}});
    } else {
      add(DistortionKind::illuminant, r, false,
          {Illuminant{{r, 1, 1}}, Illuminant{{1, r, 1}}, Illuminant{{1, 1, r}}});
    }
  }
  for (double g : kGammaLevels) add(DistortionKind::gamma, g, g == 1.0, {Gamma{g}});
  for (double s : kBlurSigmas) add(DistortionKind::blur, s, s == 0.0, {Blur{s}});
  for (double p : kNoisePercents) {
    add(DistortionKind::salt_pepper, p, p == 0, {SaltPepper{p / 100.0, kSaltFraction}});
  }
  for (double p : kNoisePercents) {
    add(DistortionKind::gaussian_noise, p, p == 0, {GaussianNoise{p / 100.0}});
  }
  for (double p : kNoisePercents) add(DistortionKind::speckle, p, p == 0, {Speckle{p / 100.0}});
  add(DistortionKind::poisson, kPoissonScale, false, {Poisson{kPoissonScale}});
  return grid;
}

inline std::string describe(const DistortionParams& params) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Contrast>) return "c=" + format_parameter(p.percent);
        else if constexpr (std::is_same_v<P, Illuminant>)
          return "l=(" + format_parameter(p.gains[0]) + "," + format_parameter(p.gains[1]) + "," +
                 format_parameter(p.gains[2]) + ")";
        else if constexpr (std::is_same_v<P, Blur>) return "sigma=" + format_parameter(p.sigma);
        else if constexpr (std::is_same_v<P, Gamma>) return "gamma=" + format_parameter(p.exponent);
        else if constexpr (std::is_same_v<P, SaltPepper>)
          return "p=" + format_parameter(p.density) + ",salt=" + format_parameter(p.salt_fraction);
        else if constexpr (std::is_same_v<P, GaussianNoise> || std::is_same_v<P, Speckle>)
          return "sigma=" + format_parameter(p.sigma);
        else return "scale=" + format_parameter(p.scale);
      },
      params);
}

}  // namespace kernelscope
