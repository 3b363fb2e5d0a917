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
#include <vector>

#include "kernelscope/distort.hpp"
#include "kernelscope/error.hpp"
#include "kernelscope/intelligence.hpp"
#include "kernelscope/similarity.hpp"

namespace kernelscope {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

inline constexpr Rgb kYellow{0xFF, 0xD4, 0x00};
inline constexpr Rgb kGreen{0x1A, 0x96, 0x41};
inline constexpr Rgb kRed{0xD7, 0x19, 0x1C};

// Piecewise-linear RGB colour map; values outside the anchor range clamp to
// the end stops.
class ColorScale {
 public:
  struct Stop {
    double value;
    Rgb color;
  };

  explicit ColorScale(std::vector<Stop> stops) : stops_(std::move(stops)) {
    detail::require(!stops_.empty(), "colour scale needs at least one stop");
    for (std::size_t i = 1; i < stops_.size(); ++i) {
      detail::require(stops_[i].value > stops_[i - 1].value,
                      "colour scale stops must be strictly increasing");
    }
  }

  // -1 yellow, 0 green, +1 red.
  static ColorScale diverging() { return ColorScale({{-1.0, kYellow}, {0.0, kGreen}, {1.0, kRed}}); }
  // 0 red to 1 green.
  static ColorScale sequential() { return ColorScale({{0.0, kRed}, {1.0, kGreen}}); }

  double low() const { return stops_.front().value; }
  double high() const { return stops_.back().value; }
  const std::vector<Stop>& stops() const { return stops_; }

  Rgb operator()(double value) const {
    value = std::clamp(value, low(), high());
    for (std::size_t i = 1; i < stops_.size(); ++i) {
      if (value <= stops_[i].value) {
        const Stop& a = stops_[i - 1];
        const Stop& b = stops_[i];
        const double t = (value - a.value) / (b.value - a.value);
        auto mix = [t](std::uint8_t x, std::uint8_t y) {
          return static_cast<std::uint8_t>(std::lround(x + t * (static_cast<double>(y) - x)));
        };
        return {mix(a.color.r, b.color.r), mix(a.color.g, b.color.g), mix(a.color.b, b.color.b)};
      }
    }
    return stops_.back().color;
  }

 private:
  std::vector<Stop> stops_;
};

inline ColorScale default_scale(MatrixKind kind) {
  return kind == MatrixKind::diff ? ColorScale::diverging() : ColorScale::sequential();
}

// Fixed six-significant-digit formatting used in every rendered document.
inline std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline std::string svg_open(double width, double height, const std::string& title) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n<title>" + xml_escape(title) +
         "</title>\n<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"#FFFFFF\"/>\n";
}

inline std::string text(double x, double y, const std::string& body,
                        const std::string& extra = "") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\"" + (extra.empty() ? "" : " " + extra) +
         ">" + xml_escape(body) + "</text>\n";
}

inline std::string rect(double x, double y, double w, double h, const std::string& fill,
                        const std::string& cls, const std::string& tooltip = "") {
  std::string out = "<rect class=\"" + cls + "\" x=\"" + num(x) + "\" y=\"" + num(y) +
                    "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
  if (tooltip.empty()) return out + "/>\n";
  return out + "><title>" + xml_escape(tooltip) + "</title></rect>\n";
}

inline std::string line(double x1, double y1, double x2, double y2, const std::string& cls,
                        const std::string& stroke = "#000000") {
  return "<line class=\"" + cls + "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
         num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\"/>\n";
}

}  // namespace detail

// n x n grid of cells coloured by scale(clamp(value)), with row/column labels
// and a vertical legend. Raw values appear in each cell's tooltip.
inline std::string render_heatmap(const PairMatrix& matrix, const ColorScale& scale) {
  const std::size_t n = matrix.size();
  detail::require(n >= 1 && matrix.values.size() == n * n, "heatmap matrix is malformed");
  constexpr double cell = 24.0;
  constexpr double margin = 96.0;
  constexpr double legend_w = 90.0;
  const double grid = cell * static_cast<double>(n);
  const double width = margin + grid + legend_w;
  const double height = margin + grid + 16.0;
  std::string svg = detail::svg_open(width, height, to_string(matrix.kind) + " matrix");

  for (std::size_t i = 0; i < n; ++i) {
    const double centre = margin + cell * (static_cast<double>(i) + 0.5);
    svg += detail::text(margin - 4.0, centre + 4.0, matrix.ids[i],
                        "class=\"row-label\" text-anchor=\"end\"");
    svg += detail::text(centre, margin - 4.0, matrix.ids[i],
                        "class=\"col-label\" text-anchor=\"start\" transform=\"rotate(-90 " +
                            num(centre) + " " + num(margin - 4.0) + ")\"");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = matrix.at(i, j);
      svg += detail::rect(margin + cell * static_cast<double>(j), margin + cell * static_cast<double>(i),
                          cell, cell, hex(scale(v)), "cell",
                          matrix.ids[i] + " / " + matrix.ids[j] + ": " + num(v));
    }
  }

  constexpr int steps = 20;
  const double lx = margin + grid + 16.0;
  const double step_h = grid / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = 1.0 - (static_cast<double>(s) + 0.5) / steps;
    const double v = scale.low() + t * (scale.high() - scale.low());
    svg += detail::rect(lx, margin + step_h * s, 16.0, step_h, hex(scale(v)), "legend");
  }
  for (const auto& stop : scale.stops()) {
    const double t = (stop.value - scale.low()) / (scale.high() - scale.low());
    const double y = scale.high() == scale.low() ? margin : margin + grid * (1.0 - t);
    svg += detail::text(lx + 20.0, y + 4.0, num(stop.value), "class=\"legend-label\"");
  }
  return svg + "</svg>\n";
}

inline std::string render_heatmap(const PairMatrix& matrix) {
  return render_heatmap(matrix, default_scale(matrix.kind));
}

inline constexpr std::array<Rgb, kDistortionKinds> kTypeColors = {{
    {0x1F, 0x77, 0xB4}, {0xFF, 0x7F, 0x0E}, {0x2C, 0xA0, 0x2C}, {0xD6, 0x27, 0x28},
    {0x94, 0x67, 0xBD}, {0x8C, 0x56, 0x4B}, {0xE3, 0x77, 0xC2}, {0x7F, 0x7F, 0x7F},
}};

// One stacked bar per network; segment t has height type_mean[t] / 8, so the
// bar height equals vi_score. Zero-height segments are omitted.
inline std::string render_vi_bars(const std::vector<AccuracyProfile>& profiles) {
  detail::require(!profiles.empty(), "render_vi_bars needs at least one profile");
  constexpr double plot_h = 300.0;
  constexpr double bar_w = 24.0;
  constexpr double gap = 12.0;
  constexpr double left = 56.0;
  constexpr double top = 20.0;
  constexpr double legend_h = 8 * 16.0 + 8.0;
  const double plot_w = (bar_w + gap) * static_cast<double>(profiles.size()) + gap;
  const double width = left + plot_w + 140.0;
  const double height = top + plot_h + 64.0 + std::max(0.0, legend_h - plot_h);
  std::string svg = detail::svg_open(width, height, "visual intelligence");

  const double base = top + plot_h;
  svg += detail::line(left, top, left, base, "axis");
  svg += detail::line(left, base, left + plot_w, base, "axis");
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    const double y = base - v * plot_h;
    svg += detail::line(left - 4.0, y, left, y, "tick");
    svg += detail::text(left - 6.0, y + 4.0, num(v), "class=\"tick-label\" text-anchor=\"end\"");
  }

  for (std::size_t b = 0; b < profiles.size(); ++b) {
    const AccuracyProfile& p = profiles[b];
    const double x = left + gap + (bar_w + gap) * static_cast<double>(b);
    double y = base;
    for (std::size_t t = 0; t < kDistortionKinds; ++t) {
      const double h = p.type_means[t] / static_cast<double>(kDistortionKinds) * plot_h;
      if (h <= 0.0) continue;
      y -= h;
      svg += detail::rect(x, y, bar_w, h, hex(kTypeColors[t]), "segment",
                          p.network_id + " " + to_string(static_cast<DistortionKind>(t)) + ": " +
                              num(p.type_means[t]));
    }
    svg += "<g class=\"bar\" data-id=\"" + xml_escape(p.network_id) + "\" data-height=\"" +
           num(p.vi_score) + "\"/>\n";
    svg += detail::text(x + bar_w / 2.0, base + 14.0, p.network_id,
                        "class=\"bar-label\" text-anchor=\"middle\"");
  }

  const double lx = left + plot_w + 16.0;
  for (std::size_t t = 0; t < kDistortionKinds; ++t) {
    const double y = top + 16.0 * static_cast<double>(t);
    svg += detail::rect(lx, y, 12.0, 12.0, hex(kTypeColors[t]), "legend");
    svg += detail::text(lx + 16.0, y + 10.0, to_string(static_cast<DistortionKind>(t)),
                        "class=\"legend-label\"");
  }
  return svg + "</svg>\n";
}

// Mean correlation per conv layer (x = layer index in graph order) with
// +/- 1 standard deviation whiskers. The y axis spans
// [min(0, lowest whisker), max(1, highest whisker)].
inline std::string render_layer_profile(const std::vector<LayerProfilePoint>& series) {
  detail::require(!series.empty(), "render_layer_profile needs a non-empty series");
  constexpr double plot_h = 240.0;
  constexpr double step = 18.0;
  constexpr double left = 56.0;
  constexpr double top = 20.0;
  const double plot_w = step * static_cast<double>(series.size() + 1);
  double lo = 0.0, hi = 1.0;
  for (const auto& p : series) {
    lo = std::min(lo, p.mean_r - p.std_r);
    hi = std::max(hi, p.mean_r + p.std_r);
  }
  const double width = left + plot_w + 20.0;
  const double height = top + plot_h + 40.0;
  auto ypos = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };
  auto xpos = [&](std::size_t i) { return left + step * static_cast<double>(i + 1); };

  std::string svg = detail::svg_open(width, height, "layer profile");
  svg += detail::line(left, top, left, top + plot_h, "axis");
  svg += detail::line(left, top + plot_h, left + plot_w, top + plot_h, "axis");
  for (double v : {lo, 0.0, hi}) {
    svg += detail::text(left - 6.0, ypos(v) + 4.0, num(v), "class=\"tick-label\" text-anchor=\"end\"");
  }
  if (lo < 0.0) svg += detail::line(left, ypos(0.0), left + plot_w, ypos(0.0), "zero", "#BBBBBB");

  std::string points;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) points += " ";
    points += num(xpos(i)) + "," + num(ypos(series[i].mean_r));
  }
  svg += "<polyline class=\"trace\" fill=\"none\" stroke=\"#1F77B4\" points=\"" + points + "\"/>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& p = series[i];
    svg += "<line class=\"whisker\" data-layer=\"" + xml_escape(p.layer) + "\" data-low=\"" +
           num(p.mean_r - p.std_r) + "\" data-high=\"" + num(p.mean_r + p.std_r) + "\" x1=\"" +
           num(xpos(i)) + "\" y1=\"" + num(ypos(p.mean_r - p.std_r)) + "\" x2=\"" + num(xpos(i)) +
           "\" y2=\"" + num(ypos(p.mean_r + p.std_r)) + "\" stroke=\"#555555\"/>\n";
    svg += "<circle class=\"point\" cx=\"" + num(xpos(i)) + "\" cy=\"" + num(ypos(p.mean_r)) +
           "\" r=\"3\" fill=\"#1F77B4\"><title>" + xml_escape(p.layer) + ": " + num(p.mean_r) +
           " +/- " + num(p.std_r) + "</title></circle>\n";
    svg += detail::text(xpos(i), top + plot_h + 14.0, std::to_string(i),
                        "class=\"layer-index\" text-anchor=\"middle\"");
  }
  return svg + "</svg>\n";
}

}  // namespace kernelscope
