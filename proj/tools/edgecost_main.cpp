/* Copyright 2026 The EdgeCost Authors. All Rights Reserved.

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

// edgecost: static compute / bandwidth analyzer for ONNX CNNs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "edgecost/errors.hpp"
#include "edgecost/hw_advisor.hpp"
#include "edgecost/report.hpp"
#include "edgecost/zoo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;

struct GlobalFlags {
  std::string dtype = "fp32";
  bool no_fusion = false;
  bool per_consumer_reads = false;
  std::string input_shape;
  std::string profile;
  std::string cache_dir;
  bool no_overlap = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

edgecost::Shape parse_input_shape(const std::string& text) {
  edgecost::Shape shape;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      shape.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--input-shape expects positive integers N,C,H,W, got '" + text + "'");
    }
  }
  if (shape.size() != 4) throw UsageError("--input-shape expects four dims N,C,H,W, got '" + text + "'");
  return shape;
}

edgecost::AnalysisOptions make_options(const GlobalFlags& flags) {
  edgecost::AnalysisOptions options;
  try {
    options.dtype = edgecost::DType::parse(flags.dtype);
  } catch (const std::exception&) {
    throw UsageError("--dtype must be fp32, fp16 or int8");
  }
  options.fusion = !flags.no_fusion;
  options.per_consumer_reads = flags.per_consumer_reads;
  if (!flags.input_shape.empty()) options.input_shape = parse_input_shape(flags.input_shape);
  if (!flags.profile.empty()) options.profile = edgecost::load_profile(flags.profile);
  options.overlap = !flags.no_overlap;
  options.cache_dir = flags.cache_dir.empty() ? edgecost::default_cache_dir() : std::filesystem::path(flags.cache_dir);
  return options;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

int list_profiles(bool as_json) {
  if (as_json) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& p : edgecost::builtin_profiles()) {
      list.push_back({{"name", p.name},
                      {"peak_gflops", p.peak_compute / 1e9},
                      {"bandwidth_gbps", p.mem_bandwidth / 1e9},
                      {"note", p.note}});
    }
    std::cout << list.dump(2) << "\n";
    return kExitOk;
  }
  std::printf("%-14s %12s %14s %10s  %s\n", "name", "GFLOP/s", "GB/s", "ridge", "note");
  for (const auto& p : edgecost::builtin_profiles()) {
    std::printf("%-14s %12.1f %14.1f %10s  %s\n", p.name.c_str(), p.peak_compute / 1e9, p.mem_bandwidth / 1e9,
                edgecost::format_float(p.ridge_intensity()).c_str(), p.note.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static FLOP, parameter and memory-traffic analyzer for ONNX CNN models"};
  app.require_subcommand(1);
  GlobalFlags flags;
  const auto global = [&](CLI::App* cmd) {
    cmd->add_option("--dtype", flags.dtype, "element type assumed for weights and activations (fp32|fp16|int8)");
    cmd->add_flag("--no-fusion", flags.no_fusion, "skip batchnorm folding and activation fusion");
    cmd->add_flag("--per-consumer-reads", flags.per_consumer_reads,
                  "charge one read per consumer instead of one per tensor");
    cmd->add_option("--input-shape", flags.input_shape, "override the input shape, N,C,H,W");
    cmd->add_option("--profile", flags.profile, "hardware profile: builtin name or JSON file");
    cmd->add_option("--cache-dir", flags.cache_dir, "model cache (default $EDGECOST_CACHE)");
    cmd->add_flag("--no-overlap", flags.no_overlap, "add compute and transfer time instead of overlapping them");
  };

  bool json = false;
  bool csv = false;
  std::string svg_path;
  unsigned jobs = 0;

  std::string analyze_target;
  CLI::App* analyze = app.add_subcommand("analyze", "per-layer report for one model (file or registry name)");
  analyze->add_option("model", analyze_target, "model file or registry name")->required();
  analyze->add_flag("--json", json, "emit JSON");
  analyze->add_flag("--csv", csv, "emit per-layer CSV");
  global(analyze);

  std::vector<std::string> compare_targets;
  CLI::App* compare = app.add_subcommand("compare", "summary rows for several models");
  compare->add_option("models", compare_targets, "model files or registry names")->required();
  compare->add_flag("--json", json, "emit JSON");
  compare->add_flag("--csv", csv, "emit CSV");
  compare->add_option("--svg", svg_path, "write a log-log FLOPs/traffic scatter to this file");
  compare->add_option("--jobs", jobs, "parallel analyses (default: one per core)");
  global(compare);

  std::vector<std::string> fetch_targets;
  bool fetch_all = false;
  CLI::App* fetch = app.add_subcommand("fetch", "download registry models into the cache");
  fetch->add_option("models", fetch_targets, "registry names");
  fetch->add_flag("--all", fetch_all, "fetch every registry model");
  fetch->add_option("--cache-dir", flags.cache_dir, "model cache (default $EDGECOST_CACHE)");

  CLI::App* profiles = app.add_subcommand("profiles", "list builtin hardware profiles");
  profiles->add_flag("--json", json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (json && csv) throw UsageError("--json and --csv are exclusive");

    if (profiles->parsed()) return list_profiles(json);

    if (fetch->parsed()) {
      if (fetch_all) {
        for (const auto& entry : edgecost::builtin_registry()) fetch_targets.push_back(entry.name);
      }
      if (fetch_targets.empty()) throw UsageError("fetch needs model names or --all");
      const auto dir = flags.cache_dir.empty() ? edgecost::default_cache_dir() : std::filesystem::path(flags.cache_dir);
      int status = kExitOk;
      for (const std::string& name : fetch_targets) {
        try {
          std::cout << edgecost::fetch_model(name, dir).string() << "\n";
        } catch (const edgecost::Error& e) {
          std::cerr << "edgecost: " << name << ": " << e.what() << "\n";
          status = kExitAnalysis;
        }
      }
      return status;
    }

    const edgecost::AnalysisOptions options = make_options(flags);

    if (analyze->parsed()) {
      const edgecost::ModelAnalysis a = edgecost::analyze_model(analyze_target, options);
      if (json) {
        std::cout << edgecost::format_analysis_json(a);
      } else if (csv) {
        std::cout << edgecost::format_layers_csv(a);
      } else {
        std::cout << edgecost::format_layers_text(a);
      }
      return kExitOk;
    }

    if (compare_targets.size() < 2) throw UsageError("compare needs at least two models");
    const edgecost::Comparison c = edgecost::compare_models(compare_targets, options, jobs);
    if (json) {
      std::cout << edgecost::format_comparison_json(c);
    } else if (csv) {
      std::cout << edgecost::format_comparison_csv(c);
    } else {
      std::cout << edgecost::format_comparison_text(c);
    }
    if (!svg_path.empty()) write_file(svg_path, edgecost::format_comparison_svg(c));
    if (!c.errors.empty()) {
      if (json || csv) {
        for (const auto& e : c.errors) std::cerr << "edgecost: " << e.model << ": " << e.message << "\n";
      }
      return kExitPartial;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "edgecost: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "edgecost: error: " << e.what() << "\n";
    return kExitAnalysis;
  }
}
