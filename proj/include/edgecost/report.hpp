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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edgecost/bandwidth_model.hpp"
#include "edgecost/cost_model.hpp"
#include "edgecost/graph_ir.hpp"
#include "edgecost/hw_advisor.hpp"
#include "edgecost/shape_infer.hpp"

namespace edgecost {

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kComparisonCsvHeader =
    "model,macs,flops_pre,flops_post,params,param_bytes,bw_pre_bytes,bw_post_bytes,"
    "weight_bytes,activation_bytes,intensity,bound";

struct AnalysisOptions {
  DType dtype;
  bool fusion = true;
  bool per_consumer_reads = false;
  std::optional<Shape> input_shape;
  std::optional<HardwareProfile> profile;
  bool overlap = true;
  /// Where zoo names are fetched to; empty means default_cache_dir().
  std::filesystem::path cache_dir;
};

struct LayerRow {
  std::string name;
  std::string op_type;
  std::string output_shape;
  int64_t macs = 0;
  int64_t flops = 0;
  int64_t param_bytes = 0;
  int64_t traffic_bytes = 0;
  /// Name of the node this one was folded into, empty when unfused.
  std::string fused_into;
};

/// One line of a comparison. "pre"/"post" refer to fusion; with fusion
/// disabled both sides are the unfused graph. weight_bytes and
/// activation_bytes split bw_post_bytes. intensity = flops_post /
/// bw_post_bytes, rounded to 6 significant digits.
struct ModelSummaryRow {
  std::string model;
  int64_t macs = 0;
  int64_t flops_pre = 0;
  int64_t flops_post = 0;
  int64_t params = 0;
  int64_t param_bytes = 0;
  int64_t bw_pre_bytes = 0;
  int64_t bw_post_bytes = 0;
  int64_t weight_bytes = 0;
  int64_t activation_bytes = 0;
  double intensity = 0;
  std::optional<Bound> bound;

  friend bool operator==(const ModelSummaryRow&, const ModelSummaryRow&) = default;
};

struct ModelAnalysis {
  std::string model;
  std::filesystem::path source;
  AnalysisOptions options;
  GraphIR unfused;
  GraphIR analyzed;  // fused unless options.fusion is false
  ModelCost cost_pre;
  ModelCost cost_post;
  TrafficReport traffic_pre;
  TrafficReport traffic_post;
  std::vector<LayerRow> layers;
  ModelSummaryRow summary;
  std::optional<Classification> roofline;
};

/// A readable file path is used as is; otherwise a registry name is
/// fetched into the cache. Throws FileNotFound / UnknownModel.
std::filesystem::path resolve_model(const std::string& spec, const std::filesystem::path& cache_dir);

/// Display name: registry name, or the file stem.
std::string model_display_name(const std::string& spec);

ModelAnalysis analyze_model(const std::string& spec, const AnalysisOptions& options);
/// Analysis of an already loaded model (no file access).
ModelAnalysis analyze_raw(const RawModel& raw, const std::string& name, const AnalysisOptions& options);

std::string format_layers_text(const ModelAnalysis& analysis);
std::string format_layers_csv(const ModelAnalysis& analysis);
std::string format_analysis_json(const ModelAnalysis& analysis);

struct ComparisonError {
  std::string model;
  std::string message;
};

struct Comparison {
  std::vector<ModelSummaryRow> rows;  // successful models, in request order
  std::vector<ComparisonError> errors;
  AnalysisOptions options;
};

/// Analyzes models on up to `jobs` threads (0 = hardware concurrency).
/// Output order follows the request order, not completion order.
Comparison compare_models(const std::vector<std::string>& specs, const AnalysisOptions& options, unsigned jobs = 0);

std::string format_comparison_text(const Comparison& comparison);
std::string format_comparison_csv(const Comparison& comparison);
std::string format_comparison_json(const Comparison& comparison);
/// Log-log scatter, x = FLOPs, y = bytes per inference; one labeled
/// circle per row. No external references.
std::string format_comparison_svg(const Comparison& comparison);

/// Reads back the rows of format_comparison_json.
std::vector<ModelSummaryRow> rows_from_json(const std::string& text);

/// %.6g, the fixed float format of every report.
std::string format_float(double value);

}  // namespace edgecost
