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

#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "edgecost/errors.hpp"
#include "edgecost/report.hpp"
#include "fixtures.hpp"

using namespace edgecost;
using namespace edgecost::testing;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("analysis of the conv chain") {
  const ModelAnalysis a = analyze_raw(conv_relu_chain().raw(), "chain", AnalysisOptions{});
  const ModelSummaryRow& s = a.summary;
  CHECK(s.macs == 6912);
  CHECK(s.flops_pre == 2 * 6912 + 256);
  CHECK(s.flops_post == s.flops_pre);
  CHECK(s.params == 108);
  CHECK(s.param_bytes == 432);
  CHECK(s.bw_pre_bytes == 4272);
  CHECK(s.bw_post_bytes == 2224);
  CHECK(s.weight_bytes + s.activation_bytes == s.bw_post_bytes);
  CHECK(s.intensity == std::stod(format_float(static_cast<double>(s.flops_post) / 2224)));
  CHECK_FALSE(s.bound.has_value());
  REQUIRE(a.layers.size() == 2);
  CHECK(a.layers[1].fused_into == "conv");
  CHECK(a.layers[0].output_shape == "1x4x8x8");

  AnalysisOptions off;
  off.fusion = false;
  const ModelAnalysis u = analyze_raw(conv_relu_chain().raw(), "chain", off);
  CHECK(u.summary.bw_post_bytes == 4272);
}

TEST_CASE("layer CSV halves under fp16") {
  AnalysisOptions fp16;
  fp16.dtype = DType::fp16();
  const auto full = lines(format_layers_csv(analyze_raw(conv_relu_chain().raw(), "chain", AnalysisOptions{})));
  const auto half = lines(format_layers_csv(analyze_raw(conv_relu_chain().raw(), "chain", fp16)));
  REQUIRE(full.size() == half.size());
  CHECK(full[0] == "layer,op,output_shape,macs,flops,param_bytes,traffic_bytes,fused_into");
  CHECK(full.back().rfind("TOTAL,", 0) == 0);
  for (size_t i = 1; i < full.size(); ++i) {
    const auto f = split(full[i]);
    const auto h = split(half[i]);
    CHECK(std::stoll(f[5]) == 2 * std::stoll(h[5]));
    CHECK(std::stoll(f[6]) == 2 * std::stoll(h[6]));
    CHECK(f[3] == h[3]);
  }
}

TEST_CASE("analysis JSON") {
  AnalysisOptions o;
  o.profile = load_profile("edge-npu");
  const ModelAnalysis a = analyze_raw(conv_relu_chain().raw(), "chain", o);
  const auto j = nlohmann::json::parse(format_analysis_json(a));
  CHECK(j["schema_version"] == 1);
  CHECK(j["totals"]["param_bytes"] == 432);
  CHECK(j["totals"]["bw_post_bytes"] == 2224);
  CHECK(j["roofline"]["bound"] == "bandwidth");
  CHECK(j["layers"].size() == 2);
  CHECK(format_analysis_json(a) == format_analysis_json(analyze_raw(conv_relu_chain().raw(), "chain", o)));
}

TEST_CASE("model resolution") {
  TempDir dir;
  write_model(dir / "chain.onnx", conv_relu_chain().raw());
  CHECK(resolve_model((dir / "chain.onnx").string(), dir.path()) == dir / "chain.onnx");
  CHECK(model_display_name((dir / "chain.onnx").string()) == "chain");
  CHECK_THROWS_AS(resolve_model((dir / "missing.onnx").string(), dir.path()), FileNotFound);
  CHECK_THROWS_AS(resolve_model("not-a-model", dir.path()), UnknownModel);
  CHECK(analyze_model((dir / "chain.onnx").string(), AnalysisOptions{}).summary.bw_post_bytes == 2224);
}

TEST_CASE("comparison outputs") {
  TempDir dir;
  write_model(dir / "chain.onnx", conv_relu_chain().raw());
  ModelBuilder wide = conv_relu_chain();
  RawModel raw = wide.raw();
  raw.graph_inputs[0].dims->at(2) = Dim::fixed(32);
  raw.graph_inputs[0].dims->at(3) = Dim::fixed(32);
  raw.graph_outputs[0].dims.reset();
  write_model(dir / "wide.onnx", raw);

  AnalysisOptions o;
  o.profile = load_profile("mobile-gpu");
  const std::vector<std::string> specs{(dir / "wide.onnx").string(), (dir / "chain.onnx").string(),
                                       (dir / "gone.onnx").string()};
  const Comparison c = compare_models(specs, o, 3);
  REQUIRE(c.rows.size() == 2);
  CHECK(c.rows[0].model == "wide");
  CHECK(c.rows[1].model == "chain");
  REQUIRE(c.errors.size() == 1);
  CHECK(c.errors[0].model == "gone");
  CHECK(c.errors[0].message.find("file not found") != std::string::npos);

  const auto csv = lines(format_comparison_csv(c));
  CHECK(csv[0] == kComparisonCsvHeader);
  CHECK(csv.size() == 3);
  CHECK(split(csv[1]).size() == 12);

  const std::string json = format_comparison_json(c);
  CHECK(rows_from_json(json) == c.rows);
  CHECK(json == format_comparison_json(compare_models(specs, o, 1)));
  CHECK(nlohmann::json::parse(json)["errors"].size() == 1);

  const std::string svg = format_comparison_svg(c);
  size_t circles = 0;
  for (size_t pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 2);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find(">wide<") != std::string::npos);
}

TEST_CASE("float format") {
  CHECK(format_float(0.20224719101) == "0.202247");
  CHECK(format_float(1234567.0) == "1.23457e+06");
  CHECK(format_float(0) == "0");
}
