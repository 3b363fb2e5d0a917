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

// Command-line front end: validate, params, init, synth, distort, evaluate,
// similarity, compat, diff, profile, transplant, sweep, render.
//
// Exit codes: 0 success, 1 I/O failure, 2 validation or usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kernelscope/kernelscope.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ks = kernelscope;

namespace {

constexpr const char* kVersion = "kernelscope 1.0.0";

// Collects the outputs of one command and writes them plus
// "<command>.manifest.json" into the output directory.
class Run {
 public:
  Run(std::string command, fs::path out_dir) : command_(std::move(command)), dir_(std::move(out_dir)) {}

  json& config() { return config_; }

  void write(const std::string& name, const std::string& contents) {
    fs::create_directories(dir_);
    ks::write_text((dir_ / name).string(), contents);
    outputs_.push_back(name);
  }

  void write_bundle(const std::string& name, const ks::CheckpointBundle& bundle) {
    fs::create_directories(dir_);
    ks::save_bundle(bundle, (dir_ / name).string());
    outputs_.push_back(name);
  }

  void note_output(const std::string& name) { outputs_.push_back(name); }

  const fs::path& dir() const { return dir_; }

  void finish() {
    json manifest = {{"schema", ks::kSchema},
                     {"type", "run_manifest"},
                     {"version", kVersion},
                     {"command", command_},
                     {"config", config_},
                     {"outputs", outputs_}};
    fs::create_directories(dir_);
    ks::write_text((dir_ / (command_ + ".manifest.json")).string(), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  json config_ = json::object();
  std::vector<std::string> outputs_;
};

std::string stem(const std::string& path) {
  std::string s = fs::path(path).filename().string();
  for (const char* suffix : {".nncmp", ".json", ".csv", ".bin"}) {
    const std::string suf = suffix;
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
      return s.substr(0, s.size() - suf.size());
    }
  }
  return s;
}

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "auto") {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) | device();
  }
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used, 0);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw ks::ValidationError("--seed must be an unsigned integer or 'auto', got '" + text + "'");
}

struct GraphSource {
  std::string graph_path;
  std::string arch;

  void add_options(CLI::App* app) {
    app->add_option("--graph", graph_path, "Topology JSON file");
    app->add_option("--arch", arch, "Built-in architecture: resnet20, resnet50, toy-cnn");
  }

  ks::ModelGraph load() const {
    if (!graph_path.empty()) return ks::load_graph(graph_path);
    if (!arch.empty()) return ks::build_architecture(arch);
    throw ks::ValidationError("one of --graph or --arch is required");
  }

  json describe() const { return {{"graph", graph_path}, {"arch", arch}}; }
};

struct DataSource {
  std::vector<std::string> paths;
  std::size_t max_records = 0;
  std::size_t resize = 0;
  std::size_t crop = 0;

  void add_options(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--data", paths,
                                "CIFAR-10 binary batch(es) or NNCMPv1 container with 'images' "
                                "(n,h,w,3) and 'labels' (n); repeat for several files");
    opt->allow_extra_args(false);
    if (required) opt->required();
    app->add_option("--max-records", max_records, "Cap on images read per file (0 = all)");
    app->add_option("--resize", resize, "Resize shorter edge to this many pixels before cropping");
    app->add_option("--crop", crop, "Central square crop side (with --resize)");
  }

  ks::LabeledDataset load() const {
    std::vector<ks::Tensor> images;
    std::vector<std::uint32_t> labels;
    std::uint32_t classes = 0;
    for (const auto& path : paths) {
      const std::string bytes = ks::read_file(path);
      ks::LabeledDataset part;
      if (bytes.size() >= 8 && bytes.compare(0, 8, std::string(ks::kContainerMagic, 8)) == 0) {
        const auto bundle = ks::decode_bundle(bytes);
        part.images = bundle.at("images");
        const auto& raw = bundle.at("labels");
        for (float v : raw.values()) {
          if (v < 0.0f || v != static_cast<float>(static_cast<std::uint32_t>(v))) {
            throw ks::ValidationError("labels must be non-negative integers");
          }
          part.labels.push_back(static_cast<std::uint32_t>(v));
          part.class_count = std::max(part.class_count, part.labels.back() + 1);
        }
        if (max_records != 0 && part.labels.size() > max_records) {
          std::vector<ks::Tensor> kept;
          for (std::size_t i = 0; i < max_records; ++i) kept.push_back(part.images.slice(i));
          part.images = ks::stack(kept);
          part.labels.resize(max_records);
        }
      } else {
        part = ks::decode_cifar10_batch(bytes, max_records);
      }
      for (std::size_t i = 0; i < part.size(); ++i) {
        ks::Tensor img = part.images.slice(i);
        if (resize != 0) img = ks::resize_center_crop(img, resize, crop != 0 ? crop : resize);
        images.push_back(std::move(img));
        labels.push_back(part.labels[i]);
      }
      classes = std::max(classes, part.class_count);
    }
    if (images.empty()) throw ks::ValidationError("no images loaded");
    ks::LabeledDataset data;
    data.images = ks::stack(images);
    data.labels = std::move(labels);
    data.class_count = classes;
    ks::validate_dataset(data);
    return data;
  }

  json describe() const {
    return {{"data", paths}, {"max_records", max_records}, {"resize", resize}, {"crop", crop}};
  }
};

std::vector<std::string> ids_for(const std::vector<std::string>& paths,
                                 const std::vector<std::string>& given) {
  if (!given.empty()) {
    if (given.size() != paths.size()) {
      throw ks::ValidationError("--ids must list one id per input");
    }
    return given;
  }
  std::vector<std::string> ids;
  for (const auto& p : paths) ids.push_back(stem(p));
  return ids;
}

ks::AccuracyProfile load_profile(const std::string& path) {
  if (fs::path(path).extension() == ".csv") {
    return ks::profile_from_csv(ks::read_file(path), stem(path));
  }
  return ks::profile_from_json(ks::read_json(path));
}

std::vector<ks::AccuracyProfile> load_profiles(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return {load_profile(path)};
  const json j = ks::read_json(path);
  if (j.value("type", "") == "profile_set") {
    std::vector<ks::AccuracyProfile> out;
    for (const auto& p : j.at("profiles")) out.push_back(ks::profile_from_json(p));
    return out;
  }
  return {ks::profile_from_json(j)};
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weight-level and behavioural similarity of same-architecture CNNs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::string seed_text = "0";
  std::size_t threads = ks::threads_from_env(1);
  std::function<void()> action;

  auto common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (fallback: KERNELSCOPE_THREADS)")
        ->check(CLI::PositiveNumber);
    if (seeded) sub->add_option("--seed", seed_text, "Global seed, or 'auto'");
  };

  // validate ---------------------------------------------------------------
  GraphSource validate_graph;
  std::string validate_bundle_path;
  std::string validate_vectors;
  double validate_tol = 1e-4;
  auto* validate = app.add_subcommand("validate", "Check a bundle against a topology");
  validate_graph.add_options(validate);
  validate->add_option("bundle", validate_bundle_path, "NNCMPv1 weight file")->required();
  validate->add_option("--vectors", validate_vectors,
                       "Verification vectors container ('inputs', 'probabilities')");
  validate->add_option("--tol", validate_tol, "Max abs probability difference for --vectors");
  validate->add_option("--threads", threads, "Worker threads");
  validate->callback([&] {
    action = [&] {
      const auto graph = validate_graph.load();
      const auto bundle = ks::load_bundle(validate_bundle_path);
      ks::validate_bundle(graph, bundle);
      std::cout << "ok: " << bundle.tensors.size() << " tensors, " << ks::parameter_count(graph)
                << " parameters\n";
      if (!validate_vectors.empty()) {
        const auto vectors = ks::load_bundle(validate_vectors);
        const double diff = ks::verification_max_abs_diff(graph, bundle, vectors, threads);
        std::cout << "verification max abs diff: " << diff << "\n";
        if (!(diff < validate_tol)) {
          throw ks::ValidationError("verification vectors differ by " + std::to_string(diff) +
                                    " (tolerance " + std::to_string(validate_tol) + ")");
        }
      }
    };
  });

  // params -----------------------------------------------------------------
  GraphSource params_graph;
  std::string params_positional;
  auto* params = app.add_subcommand("params", "Print the parameter count of an architecture");
  params_graph.add_options(params);
  params->add_option("arch_name", params_positional, "Built-in architecture name");
  params->callback([&] {
    action = [&] {
      if (!params_positional.empty()) params_graph.arch = params_positional;
      std::cout << ks::parameter_count(params_graph.load()) << "\n";
    };
  });

  // init -------------------------------------------------------------------
  std::string init_arch = "toy-cnn";
  std::string init_name;
  std::size_t init_classes = 0;
  auto* init = app.add_subcommand("init", "Write a topology and randomly initialised weights");
  init->add_option("--arch", init_arch, "resnet20, resnet50, toy-cnn or nearest-mean");
  init->add_option("--name", init_name, "Output file stem (default: arch)");
  init->add_option("--classes", init_classes, "Number of classes (0 = architecture default)");
  common(init, true);
  init->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(seed_text);
      std::cerr << "seed: " << seed << "\n";
      Run run("init", out_dir);
      const std::string name = init_name.empty() ? init_arch : init_name;
      run.config() = {{"arch", init_arch}, {"name", name}, {"classes", init_classes}, {"seed", seed}};
      if (init_arch == "nearest-mean") {
        auto [graph, bundle] = ks::build_nearest_mean_classifier(
            static_cast<std::uint32_t>(init_classes ? init_classes : 10), 32, 32);
        run.write(name + ".graph.json", ks::to_json(graph).dump(2) + "\n");
        run.write_bundle(name + ".nncmp", bundle);
      } else {
        const auto graph = ks::build_architecture(init_arch, init_classes);
        run.write(name + ".graph.json", ks::to_json(graph).dump(2) + "\n");
        run.write_bundle(name + ".nncmp", ks::random_bundle(graph, seed));
      }
      run.finish();
    };
  });

  // synth ------------------------------------------------------------------
  std::size_t synth_n = 100;
  std::uint32_t synth_classes = 10;
  std::string synth_name = "synthetic";
  auto* synth = app.add_subcommand("synth", "Write a synthetic separable dataset (CIFAR-10 layout)");
  synth->add_option("--n", synth_n, "Number of images")->check(CLI::PositiveNumber);
  synth->add_option("--classes", synth_classes, "Number of classes")->check(CLI::Range(1, 10));
  synth->add_option("--name", synth_name, "Output file stem");
  common(synth, true);
  synth->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(seed_text);
      std::cerr << "seed: " << seed << "\n";
      Run run("synth", out_dir);
      run.config() = {{"n", synth_n}, {"classes", synth_classes}, {"seed", seed}};
      const auto data = ks::make_synthetic_dataset(seed, synth_n, 32, 32, synth_classes);
      fs::create_directories(run.dir());
      ks::save_cifar10_batch(data, (run.dir() / (synth_name + ".bin")).string());
      run.note_output(synth_name + ".bin");
      run.finish();
    };
  });

  // distort ----------------------------------------------------------------
  DataSource distort_data;
  auto* distort = app.add_subcommand("distort", "Emit the distorted-image corpus for every condition");
  distort_data.add_options(distort);
  common(distort, true);
  distort->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(seed_text);
      std::cerr << "seed: " << seed << "\n";
      Run run("distort", out_dir);
      run.config() = distort_data.describe();
      run.config()["seed"] = seed;
      run.config()["threads"] = threads;
      const auto data = distort_data.load();
      const auto grid = ks::build_condition_grid(seed);
      const json corpus = ks::emit_corpus(data, grid, run.dir(), threads);
      for (const auto& entry : corpus["conditions"]) run.note_output(entry["file"].get<std::string>());
      run.write("corpus.json", corpus.dump(2) + "\n");
      run.finish();
    };
  });

  // evaluate ---------------------------------------------------------------
  GraphSource eval_graph;
  DataSource eval_data;
  std::vector<std::string> eval_bundles;
  std::vector<std::string> eval_ids;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy profile over the 34-condition grid");
  eval_graph.add_options(evaluate);
  eval_data.add_options(evaluate);
  evaluate->add_option("bundles", eval_bundles, "Weight files")->required();
  evaluate->add_option("--ids", eval_ids, "Network ids (default: file stems)")->delimiter(',')->allow_extra_args(false);
  common(evaluate, true);
  evaluate->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(seed_text);
      std::cerr << "seed: " << seed << "\n";
      Run run("evaluate", out_dir);
      const auto ids = ids_for(eval_bundles, eval_ids);
      run.config() = eval_graph.describe();
      run.config().update(eval_data.describe());
      run.config()["bundles"] = eval_bundles;
      run.config()["ids"] = ids;
      run.config()["seed"] = seed;
      run.config()["threads"] = threads;
      const auto graph = eval_graph.load();
      const auto data = eval_data.load();
      const auto grid = ks::build_condition_grid(seed);
      json set = {{"schema", ks::kSchema}, {"type", "profile_set"}, {"grid", ks::grid_to_json(grid)},
                  {"profiles", json::array()}};
      for (std::size_t i = 0; i < eval_bundles.size(); ++i) {
        const auto bundle = ks::load_bundle(eval_bundles[i]);
        const auto profile = ks::evaluate_profile(graph, bundle, data, grid, ids[i], {threads});
        run.write(ids[i] + ".profile.json", ks::to_json(profile).dump(2) + "\n");
        run.write(ids[i] + ".profile.csv", ks::to_csv(profile));
        set["profiles"].push_back(ks::to_json(profile));
        std::cout << ids[i] << " vi=" << fixed6(profile.vi_score) << "\n";
      }
      run.write("profiles.json", set.dump(2) + "\n");
      run.finish();
    };
  });

  // similarity -------------------------------------------------------------
  GraphSource sim_graph;
  std::vector<std::string> sim_bundles;
  std::vector<std::string> sim_ids;
  std::string sim_assignment = "greedy";
  auto* similarity = app.add_subcommand("similarity", "Pairwise intrinsic similarity of bundles");
  sim_graph.add_options(similarity);
  similarity->add_option("bundles", sim_bundles, "Weight files (>= 2)")->required();
  similarity->add_option("--ids", sim_ids, "Network ids (default: file stems)")->delimiter(',')->allow_extra_args(false);
  similarity->add_option("--assignment", sim_assignment, "greedy (default) or optimal");
  common(similarity, false);
  similarity->callback([&] {
    action = [&] {
      if (sim_bundles.size() < 2) throw ks::ValidationError("similarity needs at least two bundles");
      Run run("similarity", out_dir);
      auto ids = ids_for(sim_bundles, sim_ids);
      if (ids.size() == 2 && ids[0] == ids[1]) ids[1] += "'";
      run.config() = sim_graph.describe();
      run.config()["bundles"] = sim_bundles;
      run.config()["ids"] = ids;
      run.config()["assignment"] = sim_assignment;
      run.config()["threads"] = threads;
      const ks::SimilarityOptions options{ks::assignment_from_string(sim_assignment), threads};
      const auto graph = sim_graph.load();
      std::vector<ks::CheckpointBundle> bundles;
      for (const auto& path : sim_bundles) bundles.push_back(ks::load_bundle(path));
      for (std::size_t i = 0; i < bundles.size(); ++i) {
        for (std::size_t j = i + 1; j < bundles.size(); ++j) {
          const auto report = ks::network_similarity(graph, bundles[i], bundles[j], options, ids[i], ids[j]);
          run.write("similarity_" + ids[i] + "__" + ids[j] + ".json", ks::to_json(report).dump(2) + "\n");
          std::cout << ids[i] << " " << ids[j] << " " << fixed6(report.network_similarity) << "\n";
        }
      }
      const auto matrix = ks::similarity_matrix(graph, bundles, ids, options);
      run.write("is.json", ks::to_json(matrix).dump(2) + "\n");
      run.write("is.csv", ks::to_csv(matrix));
      run.finish();
    };
  });

  // compat -----------------------------------------------------------------
  std::vector<std::string> compat_inputs;
  auto* compat = app.add_subcommand("compat", "Pairwise compatibility from profile JSON/CSV files");
  compat->add_option("profiles", compat_inputs, "Profile JSON, profile set JSON, or CSV files")->required();
  common(compat, false);
  compat->callback([&] {
    action = [&] {
      Run run("compat", out_dir);
      run.config() = {{"profiles", compat_inputs}, {"threads", threads}};
      std::vector<ks::AccuracyProfile> profiles;
      for (const auto& path : compat_inputs) {
        for (auto& p : load_profiles(path)) profiles.push_back(std::move(p));
      }
      const auto matrix = ks::compatibility_matrix(profiles, threads);
      run.write("vic.json", ks::to_json(matrix).dump(2) + "\n");
      run.write("vic.csv", ks::to_csv(matrix));
      run.finish();
    };
  });

  // diff -------------------------------------------------------------------
  std::string diff_vic, diff_is;
  auto* diff = app.add_subcommand("diff", "DIFF = VIC - IS");
  diff->add_option("vic", diff_vic, "VIC matrix JSON")->required();
  diff->add_option("is", diff_is, "IS matrix JSON")->required();
  common(diff, false);
  diff->callback([&] {
    action = [&] {
      Run run("diff", out_dir);
      run.config() = {{"vic", diff_vic}, {"is", diff_is}};
      const auto matrix = ks::difference_matrix(ks::pair_matrix_from_json(ks::read_json(diff_vic)),
                                                ks::pair_matrix_from_json(ks::read_json(diff_is)));
      run.write("diff.json", ks::to_json(matrix).dump(2) + "\n");
      run.write("diff.csv", ks::to_csv(matrix));
      run.finish();
    };
  });

  // profile ----------------------------------------------------------------
  GraphSource prof_graph;
  std::string prof_a, prof_b;
  std::string prof_assignment = "greedy";
  auto* profile = app.add_subcommand("profile", "Per-layer mean/std kernel correlation of two bundles");
  prof_graph.add_options(profile);
  profile->add_option("a", prof_a, "First weight file")->required();
  profile->add_option("b", prof_b, "Second weight file")->required();
  profile->add_option("--assignment", prof_assignment, "greedy (default) or optimal");
  common(profile, false);
  profile->callback([&] {
    action = [&] {
      Run run("profile", out_dir);
      run.config() = prof_graph.describe();
      run.config()["a"] = prof_a;
      run.config()["b"] = prof_b;
      run.config()["assignment"] = prof_assignment;
      const auto graph = prof_graph.load();
      const auto report = ks::network_similarity(
          graph, ks::load_bundle(prof_a), ks::load_bundle(prof_b),
          {ks::assignment_from_string(prof_assignment), threads}, stem(prof_a), stem(prof_b));
      run.write("layer_profile.json", ks::layer_profile_json(report).dump(2) + "\n");
      run.write("layer_profile.csv", ks::layer_profile_csv(report));
      run.finish();
    };
  });

  // transplant -------------------------------------------------------------
  GraphSource tp_graph;
  std::string tp_dst, tp_src, tp_name = "transplanted";
  std::vector<std::string> tp_layers;
  bool tp_bn = false;
  bool tp_all_conv = false;
  auto* transplant = app.add_subcommand("transplant", "Copy selected layers' weights from src into dst");
  tp_graph.add_options(transplant);
  transplant->add_option("dst", tp_dst, "Destination weight file")->required();
  transplant->add_option("src", tp_src, "Source weight file")->required();
  transplant->add_option("--layers", tp_layers, "Layer names to copy")->delimiter(',')->allow_extra_args(false);
  transplant->add_flag("--all-conv", tp_all_conv, "Copy every conv layer");
  transplant->add_flag("--include-bn", tp_bn, "Also copy each conv's batchnorm vectors");
  transplant->add_option("--name", tp_name, "Output file stem");
  common(transplant, false);
  transplant->callback([&] {
    action = [&] {
      Run run("transplant", out_dir);
      const auto graph = tp_graph.load();
      std::vector<std::string> layers = tp_layers;
      if (tp_all_conv) {
        for (std::size_t i : graph.conv_layers()) layers.push_back(graph.layers()[i].name);
      }
      run.config() = tp_graph.describe();
      run.config().update({{"dst", tp_dst}, {"src", tp_src}, {"layers", layers}, {"include_bn", tp_bn}});
      auto out = ks::transplant(graph, ks::load_bundle(tp_dst), ks::load_bundle(tp_src), layers, {tp_bn});
      out.meta.provenance = "transplant of " + std::to_string(layers.size()) + " layer(s) from " +
                            stem(tp_src) + " into " + stem(tp_dst) + (tp_bn ? " (with bn)" : "");
      run.write_bundle(tp_name + ".nncmp", out);
      run.finish();
    };
  });

  // sweep ------------------------------------------------------------------
  GraphSource sw_graph;
  DataSource sw_data;
  std::string sw_dst, sw_src;
  bool sw_bn = false;
  auto* sweep = app.add_subcommand("sweep", "Single-layer transplant of every conv layer, VI deltas");
  sw_graph.add_options(sweep);
  sw_data.add_options(sweep);
  sweep->add_option("dst", sw_dst, "Destination weight file")->required();
  sweep->add_option("src", sw_src, "Source weight file")->required();
  sweep->add_flag("--include-bn", sw_bn, "Also copy each conv's batchnorm vectors");
  common(sweep, true);
  sweep->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(seed_text);
      std::cerr << "seed: " << seed << "\n";
      Run run("sweep", out_dir);
      run.config() = sw_graph.describe();
      run.config().update(sw_data.describe());
      run.config().update({{"dst", sw_dst}, {"src", sw_src}, {"include_bn", sw_bn}, {"seed", seed},
                           {"threads", threads}});
      const auto graph = sw_graph.load();
      const auto result = ks::transplant_sweep(graph, ks::load_bundle(sw_dst), ks::load_bundle(sw_src),
                                               sw_data.load(), ks::build_condition_grid(seed),
                                               {sw_bn}, {threads});
      run.write("sweep.csv", ks::to_csv(result));
      run.write("sweep.json", ks::to_json(result).dump(2) + "\n");
      run.finish();
    };
  });

  // render -----------------------------------------------------------------
  std::vector<std::string> render_inputs;
  std::string render_name;
  auto* render = app.add_subcommand("render", "SVG from a matrix, profile(s) or layer profile JSON");
  render->add_option("inputs", render_inputs, "Serialized artifact(s)")->required();
  render->add_option("--name", render_name, "Output file name (default: <input stem>.svg)");
  common(render, false);
  render->callback([&] {
    action = [&] {
      Run run("render", out_dir);
      run.config() = {{"inputs", render_inputs}};
      const std::string name = render_name.empty() ? stem(render_inputs.front()) + ".svg" : render_name;
      const json first = ks::read_json(render_inputs.front());
      const std::string type = first.value("type", "");
      std::string svg;
      if (type == "pair_matrix") {
        svg = ks::render_heatmap(ks::pair_matrix_from_json(first));
      } else if (type == "layer_profile") {
        svg = ks::render_layer_profile(ks::layer_profile_from_json(first));
      } else if (type == "accuracy_profile" || type == "profile_set") {
        std::vector<ks::AccuracyProfile> profiles;
        for (const auto& path : render_inputs) {
          for (auto& p : load_profiles(path)) profiles.push_back(std::move(p));
        }
        svg = ks::render_vi_bars(profiles);
      } else {
        throw ks::ValidationError("cannot render document of type '" + type + "'");
      }
      run.write(name, svg);
      run.finish();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    action();
  } catch (const ks::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ks::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
