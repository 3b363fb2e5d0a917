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
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string_view>
#include <string>
#include <vector>

#include <json.hpp>

#include "kernelscope/error.hpp"
#include "kernelscope/graph.hpp"
#include "kernelscope/tensor.hpp"

namespace kernelscope {

static_assert(std::endian::native == std::endian::little,
              "the container reader assumes a little-endian host");

inline constexpr char kContainerMagic[8] = {'N', 'N', 'C', 'M', 'P', 'v', '1', '\n'};
inline constexpr std::uint64_t kContainerVersion = 1;

struct BundleMeta {
  std::string arch;
  std::uint64_t format_version = kContainerVersion;
  std::string provenance;
  friend bool operator==(const BundleMeta&, const BundleMeta&) = default;
};

// Named weight tensors plus metadata; the unit of comparison and transplant.
// Tensors are kept sorted by name, which fixes the payload order on disk.
struct CheckpointBundle {
  std::map<std::string, Tensor> tensors;
  BundleMeta meta;

  const Tensor& at(const std::string& name) const {
    auto it = tensors.find(name);
    detail::require(it != tensors.end(), "bundle has no tensor '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const { return tensors.contains(name); }

  friend bool operator==(const CheckpointBundle&, const CheckpointBundle&) = default;
};

// Bit-level equality of every tensor and the metadata.
inline bool bit_equal(const CheckpointBundle& a, const CheckpointBundle& b) {
  if (a.meta != b.meta || a.tensors.size() != b.tensors.size()) return false;
  for (auto ia = a.tensors.begin(), ib = b.tensors.begin(); ia != a.tensors.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !bit_equal(ia->second, ib->second)) return false;
  }
  return true;
}

// Checks that every weight the graph references resolves to a tensor of the
// implied shape, and that the bundle holds nothing else.
inline void validate_bundle(const ModelGraph& graph, const CheckpointBundle& bundle) {
  std::size_t referenced = 0;
  for (std::size_t i = 0; i < graph.layers().size(); ++i) {
    const LayerSpec& spec = graph.layers()[i];
    const auto shapes = graph.weight_shapes(i);
    for (std::size_t k = 0; k < spec.weights.size(); ++k) {
      const std::string& name = spec.weights[k];
      auto it = bundle.tensors.find(name);
      detail::require(it != bundle.tensors.end(),
                      "unresolved weight '" + name + "' for layer '" + spec.name + "'");
      detail::require(it->second.shape() == shapes[k],
                      "weight '" + name + "' has shape " + shape_string(it->second.shape()) +
                          ", graph implies " + shape_string(shapes[k]));
      ++referenced;
    }
  }
  if (referenced != bundle.tensors.size()) {
    for (const auto& [name, tensor] : bundle.tensors) {
      const auto slash = name.rfind('/');
      const auto layer = graph.find(name.substr(0, slash == std::string::npos ? 0 : slash));
      const auto& weights = layer ? graph.layers()[*layer].weights : std::vector<std::string>{};
      detail::require(std::find(weights.begin(), weights.end(), name) != weights.end(),
                      "bundle tensor '" + name + "' is not referenced by the graph");
    }
  }
}

namespace detail {

inline std::uint64_t align8(std::uint64_t n) { return (n + 7) & ~std::uint64_t{7}; }

inline void put_u64(std::string& out, std::uint64_t v) {
  char bytes[8];
  std::memcpy(bytes, &v, 8);
  out.append(bytes, 8);
}

}  // namespace detail

// Serializes to the NNCMPv1 layout:
//   [0, 8)      magic "NNCMPv1\n"
//   [8, 16)     u64 LE header length H
//   [16, 16+H)  JSON index {name: {shape, dtype, offset, nbytes}, "__meta__": {...}}
//   payload     raw f32 LE, offsets relative to payload start, 8-byte aligned
inline std::string encode_bundle(const CheckpointBundle& bundle) {
  nlohmann::json index = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, tensor] : bundle.tensors) {
    detail::require(name != "__meta__", "'__meta__' is a reserved tensor name");
    detail::require(tensor.all_finite(), "tensor '" + name + "' has a non-finite element");
    const std::uint64_t nbytes = tensor.size() * sizeof(float);
    index[name] = {{"shape", tensor.shape()},
                   {"dtype", "f32"},
                   {"offset", offset},
                   {"nbytes", nbytes}};
    offset = detail::align8(offset + nbytes);
  }
  index["__meta__"] = {{"arch", bundle.meta.arch},
                       {"format_version", bundle.meta.format_version},
                       {"provenance", bundle.meta.provenance}};
  const std::string header = index.dump();

  std::string out(kContainerMagic, sizeof(kContainerMagic));
  detail::put_u64(out, header.size());
  out += header;
  const std::size_t payload_start = out.size();
  for (const auto& [name, tensor] : bundle.tensors) {
    const std::uint64_t at = index[name]["offset"].get<std::uint64_t>();
    out.resize(payload_start + at, '\0');
    out.append(reinterpret_cast<const char*>(tensor.data().data()), tensor.size() * sizeof(float));
  }
  return out;
}

inline CheckpointBundle decode_bundle(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kContainerMagic, 8) != 0) {
    detail::fail("bad magic: not an NNCMPv1 container");
  }
  std::uint64_t header_len = 0;
  std::memcpy(&header_len, bytes.data() + 8, 8);
  if (header_len > bytes.size() - 16) detail::fail("truncated header");
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    detail::fail(std::string("malformed container header: ") + e.what());
  }
  detail::require(index.is_object(), "container header must be a JSON object");

  CheckpointBundle bundle;
  if (index.contains("__meta__")) {
    const auto& m = index["__meta__"];
    bundle.meta.arch = m.value("arch", std::string());
    bundle.meta.format_version = m.value("format_version", kContainerVersion);
    bundle.meta.provenance = m.value("provenance", std::string());
    detail::require(bundle.meta.format_version == kContainerVersion,
                    "unsupported container format version " +
                        std::to_string(bundle.meta.format_version));
  }

  const std::string_view payload = bytes.substr(16 + header_len);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;
  for (const auto& [name, entry] : index.items()) {
    if (name == "__meta__") continue;
    Shape shape;
    std::uint64_t offset = 0;
    std::uint64_t nbytes = 0;
    try {
      detail::require(entry.value("dtype", std::string()) == "f32",
                      "tensor '" + name + "' has unsupported dtype");
      shape = entry.at("shape").get<Shape>();
      offset = entry.at("offset").get<std::uint64_t>();
      nbytes = entry.at("nbytes").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      detail::fail("malformed index entry for '" + name + "': " + e.what());
    }
    for (std::size_t extent : shape) {
      detail::require(extent > 0, "tensor '" + name + "' has a zero extent");
    }
    if (offset > payload.size() || nbytes > payload.size() - offset) {
      detail::fail("truncated payload: tensor '" + name + "' extends past end of file");
    }
    detail::require(nbytes == element_count(shape) * sizeof(float),
                    "shape/offset inconsistency: '" + name + "' declares " +
                        std::to_string(nbytes) + " bytes for shape " + shape_string(shape));
    detail::require(offset % 8 == 0, "shape/offset inconsistency: '" + name +
                                         "' offset is not 8-byte aligned");
    extents.emplace_back(offset, nbytes);
    std::vector<float> data(element_count(shape));
    std::memcpy(data.data(), payload.data() + offset, nbytes);
    Tensor tensor(std::move(shape), std::move(data));
    detail::require(tensor.all_finite(), "tensor '" + name + "' has a NaN/Inf element");
    bundle.tensors.emplace(name, std::move(tensor));
  }
  std::sort(extents.begin(), extents.end());
  for (std::size_t i = 1; i < extents.size(); ++i) {
    detail::require(extents[i - 1].first + extents[i - 1].second <= extents[i].first,
                    "shape/offset inconsistency: overlapping tensors");
  }
  return bundle;
}

inline void save_bundle(const CheckpointBundle& bundle, const std::string& path) {
  const std::string bytes = encode_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return bytes;
}

inline CheckpointBundle load_bundle(const std::string& path) {
  return decode_bundle(read_file(path));
}

}  // namespace kernelscope
