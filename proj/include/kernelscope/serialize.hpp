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

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kernelscope/distort.hpp"
#include "kernelscope/error.hpp"
#include "kernelscope/intelligence.hpp"
#include "kernelscope/similarity.hpp"
#include "kernelscope/transplant.hpp"

// JSON and CSV forms of every measurement artifact. JSON documents carry
// "schema": "kernelscope/1" and a "type" tag.
namespace kernelscope {

inline constexpr const char* kSchema = "kernelscope/1";

// Shortest text that parses back to the same double.
inline std::string exact(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline nlohmann::json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    detail::fail("'" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180).

inline std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  detail::require(!quoted, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double parse_double(const std::string& text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  detail::require(ec == std::errc() && end == text.data() + text.size(),
                  "'" + text + "' is not a number");
  return v;
}

// ---------------------------------------------------------------------------
// PairMatrix.

inline nlohmann::json to_json(const PairMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return {{"schema", kSchema}, {"type", "pair_matrix"}, {"kind", to_string(m.kind)},
          {"ids", m.ids}, {"values", rows}};
}

inline PairMatrix pair_matrix_from_json(const nlohmann::json& j) {
  try {
    detail::require(j.value("type", "") == "pair_matrix", "document is not a pair_matrix");
    PairMatrix m;
    m.kind = matrix_kind_from_string(j.at("kind").get<std::string>());
    m.ids = j.at("ids").get<std::vector<std::string>>();
    const auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    detail::require(rows.size() == m.ids.size(), "matrix row count does not match ids");
    for (const auto& row : rows) {
      detail::require(row.size() == m.ids.size(), "matrix is not square");
      m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(std::string("malformed pair_matrix: ") + e.what());
  }
}

inline std::string to_csv(const PairMatrix& m) {
  std::vector<std::string> header{"id"};
  header.insert(header.end(), m.ids.begin(), m.ids.end());
  std::string out = csv_row(header);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{m.ids[i]};
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(exact(m.at(i, j)));
    out += csv_row(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// AccuracyProfile.

inline nlohmann::json to_json(const AccuracyProfile& p) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : p.conditions) {
    conditions.push_back({{"id", c.id}, {"type", to_string(c.kind)},
                          {"parameter", c.parameter}, {"accuracy", c.accuracy}});
  }
  nlohmann::json means = nlohmann::json::object();
  for (std::size_t t = 0; t < kDistortionKinds; ++t) {
    means[to_string(static_cast<DistortionKind>(t))] = p.type_means[t];
  }
  return {{"schema", kSchema}, {"type", "accuracy_profile"}, {"network_id", p.network_id},
          {"conditions", conditions}, {"type_means", means}, {"vi_score", p.vi_score}};
}

inline AccuracyProfile profile_from_json(const nlohmann::json& j) {
  try {
    detail::require(j.value("type", "") == "accuracy_profile", "document is not an accuracy_profile");
    AccuracyProfile p;
    p.network_id = j.at("network_id").get<std::string>();
    for (const auto& c : j.at("conditions")) {
      p.conditions.push_back({c.at("id").get<std::string>(),
                              distortion_kind_from_string(c.at("type").get<std::string>()),
                              c.at("parameter").get<double>(), c.at("accuracy").get<double>()});
    }
    finalize_profile(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(std::string("malformed accuracy_profile: ") + e.what());
  }
}

// One row per condition: id, type, param, accuracy.
inline std::string to_csv(const AccuracyProfile& p) {
  std::string out = csv_row({"id", "type", "param", "accuracy"});
  for (const auto& c : p.conditions) {
    out += csv_row({c.id, to_string(c.kind), exact(c.parameter), exact(c.accuracy)});
  }
  return out;
}

inline AccuracyProfile profile_from_csv(const std::string& text, std::string network_id) {
  const auto rows = parse_csv(text);
  detail::require(!rows.empty(), "profile CSV is empty");
  detail::require(rows[0] == std::vector<std::string>{"id", "type", "param", "accuracy"},
                  "profile CSV header must be: id,type,param,accuracy");
  AccuracyProfile p;
  p.network_id = std::move(network_id);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    detail::require(row.size() == 4, "profile CSV row " + std::to_string(r) + " needs 4 fields");
    p.conditions.push_back({row[0], distortion_kind_from_string(row[1]), parse_double(row[2]),
                            parse_double(row[3])});
  }
  finalize_profile(p);
  return p;
}

inline nlohmann::json grid_to_json(const ConditionGrid& grid) {
  nlohmann::json conditions = nlohmann::json::array();
  for (std::size_t k = 0; k < grid.conditions.size(); ++k) {
    const auto& c = grid.conditions[k];
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : c.variants) variants.push_back(describe(v.params));
    conditions.push_back({{"index", k}, {"id", c.id}, {"type", to_string(c.kind)},
                          {"parameter", c.parameter}, {"identity", c.identity},
                          {"variants", variants}});
  }
  return {{"global_seed", grid.global_seed},
          {"seed_derivation", "splitmix64(splitmix64(splitmix64(global) ^ condition) ^ image)"},
          {"noise_mapping",
           "salt_pepper density = p/100 with salt fraction 0.5; gaussian and speckle sigma = p/100"},
          {"illuminant_mapping",
           "ratio r < 1 averages three variants, each attenuating one of R, G, B to r"},
          {"poisson", "single condition at scale 255"},
          {"clipping", "noisy outputs clipped to [0, 1]"},
          {"conditions", conditions}};
}

// ---------------------------------------------------------------------------
// Similarity.

inline nlohmann::json to_json(const SimilarityReport& report) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : report.layers) {
    nlohmann::json matching = nlohmann::json::array();
    for (const auto& m : layer.matching) matching.push_back({m.index_a, m.index_b, m.r});
    layers.push_back({{"name", layer.layer}, {"mean_r", layer.mean_r}, {"std_r", layer.std_r},
                      {"matched", layer.matching.size()}, {"degenerate", layer.degenerate},
                      {"matching", matching}});
  }
  return {{"schema", kSchema},
          {"type", "similarity_report"},
          {"pair", {report.id_a, report.id_b}},
          {"assignment", to_string(report.assignment)},
          {"flags",
           {{"signed_correlation", true},
            {"weights", "conv kernels only; biases, batchnorm and dense excluded"},
            {"degenerate_policy", "zero-variance kernels contribute r = 0"}}},
          {"layers", layers},
          {"network_similarity", report.network_similarity}};
}

inline nlohmann::json layer_profile_json(const SimilarityReport& report) {
  nlohmann::json points = nlohmann::json::array();
  const auto series = layer_profile(report);
  for (std::size_t i = 0; i < series.size(); ++i) {
    points.push_back({{"index", i}, {"layer", series[i].layer}, {"mean_r", series[i].mean_r},
                      {"std_r", series[i].std_r}});
  }
  return {{"schema", kSchema}, {"type", "layer_profile"}, {"pair", {report.id_a, report.id_b}},
          {"assignment", to_string(report.assignment)}, {"points", points}};
}

inline std::vector<LayerProfilePoint> layer_profile_from_json(const nlohmann::json& j) {
  try {
    detail::require(j.value("type", "") == "layer_profile", "document is not a layer_profile");
    std::vector<LayerProfilePoint> series;
    for (const auto& p : j.at("points")) {
      series.push_back({p.at("layer").get<std::string>(), p.at("mean_r").get<double>(),
                        p.at("std_r").get<double>()});
    }
    return series;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(std::string("malformed layer_profile: ") + e.what());
  }
}

inline std::string layer_profile_csv(const SimilarityReport& report) {
  std::string out = csv_row({"index", "layer", "mean_r", "std_r"});
  const auto series = layer_profile(report);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += csv_row({std::to_string(i), series[i].layer, exact(series[i].mean_r),
                    exact(series[i].std_r)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transplant sweep.

inline std::string to_csv(const SweepResult& sweep) {
  std::vector<std::string> header{"layer", "param_count", "param_count_with_bn", "param_fraction",
                                  "vi_delta"};
  for (DistortionKind kind : kAllDistortionKinds) header.push_back(to_string(kind) + "_delta");
  std::string out = csv_row(header);
  for (const auto& row : sweep.rows) {
    std::vector<std::string> fields{row.layer, std::to_string(row.param_count),
                                    std::to_string(row.param_count_bn), exact(row.param_fraction),
                                    exact(row.vi_delta)};
    for (double d : row.type_deltas) fields.push_back(exact(d));
    out += csv_row(fields);
  }
  return out;
}

inline nlohmann::json to_json(const SweepResult& sweep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : sweep.rows) {
    nlohmann::json deltas = nlohmann::json::object();
    for (std::size_t t = 0; t < kDistortionKinds; ++t) {
      deltas[to_string(static_cast<DistortionKind>(t))] = row.type_deltas[t];
    }
    rows.push_back({{"layer", row.layer}, {"param_count", row.param_count},
                    {"param_count_with_bn", row.param_count_bn},
                    {"param_fraction", row.param_fraction}, {"vi_delta", row.vi_delta},
                    {"type_deltas", deltas}});
  }
  return {{"schema", kSchema}, {"type", "transplant_sweep"}, {"include_bn", sweep.include_bn},
          {"baseline_vi", sweep.baseline.vi_score}, {"rows", rows}};
}

}  // namespace kernelscope
