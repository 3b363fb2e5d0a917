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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kernelscope/bundle.hpp"
#include "kernelscope/dataset.hpp"
#include "kernelscope/distort.hpp"
#include "kernelscope/parallel.hpp"
#include "kernelscope/serialize.hpp"

namespace kernelscope {

// Writes every grid condition applied to every image as an NNCMPv1 container
// ("images", plus "images/0".."images/2" for the three illuminant variants)
// and returns the manifest mapping condition id to file, parameters and
// seed material. File names are relative to `directory`.
inline nlohmann::json emit_corpus(const LabeledDataset& dataset, const ConditionGrid& grid,
                                  const std::filesystem::path& directory, std::size_t threads = 1) {
  validate_dataset(dataset);
  std::filesystem::create_directories(directory);
  const std::size_t n = dataset.size();
  std::vector<Tensor> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = dataset.images.slice(i);

  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t k = 0; k < grid.conditions.size(); ++k) {
    const Condition& condition = grid.conditions[k];
    CheckpointBundle bundle;
    bundle.meta.arch = "distortion-corpus";
    bundle.meta.provenance = condition.id;
    nlohmann::json variants = nlohmann::json::array();
    for (std::size_t v = 0; v < condition.variants.size(); ++v) {
      const DistortionSpec& spec = condition.variants[v];
      std::vector<Tensor> out(n);
      parallel_for(n, threads, [&](std::size_t i) { out[i] = apply_distortion(images[i], spec, i); });
      const std::string name =
          condition.variants.size() == 1 ? "images" : "images/" + std::to_string(v);
      bundle.tensors.emplace(name, stack(out));
      variants.push_back({{"tensor", name}, {"params", describe(spec.params)}});
    }
    std::string file = condition.id;
    for (char& c : file) {
      if (c == '/') c = '_';
    }
    file += ".nncmp";
    save_bundle(bundle, (directory / file).string());
    entries.push_back({{"index", k},
                       {"id", condition.id},
                       {"type", to_string(condition.kind)},
                       {"parameter", condition.parameter},
                       {"file", file},
                       {"variants", variants},
                       {"seed", {{"global", grid.global_seed}, {"condition_index", k}}}});
  }
  return {{"schema", kSchema}, {"type", "distortion_corpus"}, {"images", n},
          {"grid", grid_to_json(grid)}, {"conditions", entries}};
}

}  // namespace kernelscope
