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

// Integration tests over the exported model corpus. Expected counts were
// taken from an independent dump made with the onnx Python package
// (tests/oracles/graph_dump.py), not from this library.

#include <doctest.h>

#include <sys/resource.h>

#include <map>

#include "edgecost/bandwidth_model.hpp"
#include "edgecost/cost_model.hpp"
#include "edgecost/fusion.hpp"
#include "edgecost/model_io.hpp"
#include "edgecost/report.hpp"
#include "fixtures.hpp"

using namespace edgecost;
using namespace edgecost::testing;

namespace {

struct Expected {
  size_t initializers;  // as stored in the file
  int64_t params;
  size_t bn_nodes;
  std::map<std::string, int> patterns;  // fusion groups by op chain
};

const std::map<std::string, Expected>& expected() {
  static const std::map<std::string, Expected> table = {
      {"alexnet", {16, 61100840, 0, {{"Conv+Relu", 5}, {"Gemm+Relu", 2}}}},
      {"densenet121", {606, 8062504, 121, {{"Conv+BatchNormalization+Relu", 59}}}},
      {"efficientnet-b0", {311, 5330564, 49, {{"Conv+BatchNormalization", 49}, {"Conv+Sigmoid", 16}}}},
      {"googlenet", {287, 6639464, 57, {{"Conv+BatchNormalization+Relu", 57}}}},
      {"mobilenetv2", {262, 3538984, 52, {{"Conv+BatchNormalization", 17}, {"Conv+BatchNormalization+Clip", 35}}}},
      {"resnet101", {522, 44654504, 104, {{"Conv+BatchNormalization", 37}, {"Conv+BatchNormalization+Relu", 67}}}},
      {"resnet152", {777, 60344232, 155, {{"Conv+BatchNormalization", 54}, {"Conv+BatchNormalization+Relu", 101}}}},
      {"resnet18", {102, 11699112, 20, {{"Conv+BatchNormalization", 11}, {"Conv+BatchNormalization+Relu", 9}}}},
      {"resnet34", {182, 21814696, 36, {{"Conv+BatchNormalization", 19}, {"Conv+BatchNormalization+Relu", 17}}}},
      {"resnet50", {267, 25610152, 53, {{"Conv+BatchNormalization", 20}, {"Conv+BatchNormalization+Relu", 33}}}},
      {"shufflenetv2", {282, 2294784, 56, {{"Conv+BatchNormalization", 19}, {"Conv+BatchNormalization+Relu", 37}}}},
      {"squeezenet1.0", {52, 1248424, 0, {{"Conv+Relu", 26}}}},
      {"vgg16", {32, 138357544, 0, {{"Conv+Relu", 13}, {"Gemm+Relu", 2}}}},
  };
  return table;
}

std::filesystem::path model_path(const std::string& name) { return *corpus_dir() / (name + ".onnx"); }

struct GroupCounts {
  std::map<std::string, int> by_pattern;  // e.g. "Conv+BatchNormalization+Relu"
  int folded_bn = 0;
};

GroupCounts groups(const GraphIR& ir) {
  GroupCounts out;
  for (const FusionGroup& g : ir.fusion_groups) {
    std::string key = ir.nodes[g.anchor].op_type;
    for (int id : g.absorbed) {
      key += "+" + ir.nodes[id].op_type;
      if (ir.nodes[id].op_type == "BatchNormalization") ++out.folded_bn;
    }
    ++out.by_pattern[key];
  }
  return out;
}

size_t count_op(const GraphIR& ir, const std::string& op) {
  return static_cast<size_t>(std::count_if(ir.nodes.begin(), ir.nodes.end(), [&](const Node& n) { return n.op_type == op; }));
}

}  // namespace

TEST_CASE("corpus is available") {
  REQUIRE_MESSAGE(corpus_dir().has_value(), "EDGECOST_CORPUS is not set");
  for (const auto& [name, e] : expected()) CHECK_MESSAGE(std::filesystem::exists(model_path(name)), name);
}

TEST_CASE("every model loads, validates and sizes") {
  REQUIRE(corpus_dir());
  for (const auto& [name, e] : expected()) {
    CAPTURE(name);
    const RawModel raw = load_model(model_path(name));
    CHECK(raw.initializers.size() == e.initializers);
    const GraphIR ir = infer_shapes(build_ir(raw));
    CHECK(validate(ir).empty());
    CHECK(count_op(ir, "BatchNormalization") == e.bn_nodes);
    CHECK(model_cost(ir).totals.params == e.params);
  }
}

TEST_CASE("fusion patterns") {
  REQUIRE(corpus_dir());
  for (const auto& [name, e] : expected()) {
    CAPTURE(name);
    const GroupCounts g = groups(apply_fusion(shaped(load_model(model_path(name)))));
    CHECK(g.by_pattern == e.patterns);
  }
  // Every BatchNormalization that follows a Conv is folded; DenseNet's
  // pre-activation BNs follow a Concat and stay.
  const GroupCounts dense = groups(apply_fusion(shaped(load_model(model_path("densenet121")))));
  CHECK(dense.folded_bn == 59);
  CHECK(groups(apply_fusion(shaped(load_model(model_path("resnet50"))))).folded_bn == 53);
}

TEST_CASE("per-layer values read from real graphs") {
  REQUIRE(corpus_dir());
  const GraphIR resnet = shaped(load_model(model_path("resnet50")));
  CHECK(resnet.tensor(resnet.nodes[0].outputs[0]).shape == Shape{1, 64, 112, 112});
  CHECK(node_cost(resnet.nodes[0], resnet).macs == 118013952);

  const GraphIR alex = shaped(load_model(model_path("alexnet")));
  std::vector<int64_t> gemm_macs;
  for (const Node& n : alex.nodes) {
    if (n.op_type == "Gemm") gemm_macs.push_back(node_cost(n, alex).macs);
  }
  REQUIRE(gemm_macs.size() == 3);
  CHECK(gemm_macs[0] == 37748736);
}

TEST_CASE("loading is deterministic") {
  REQUIRE(corpus_dir());
  const RawModel a = load_model(model_path("googlenet"));
  const RawModel b = load_model(model_path("googlenet"));
  CHECK(a == b);
  const GraphIR ia = shaped(a), ib = shaped(b);
  REQUIRE(ia.nodes.size() == ib.nodes.size());
  for (size_t i = 0; i < ia.nodes.size(); ++i) CHECK(ia.nodes[i].name == ib.nodes[i].name);
}

TEST_CASE("traffic properties on every model") {
  REQUIRE(corpus_dir());
  for (const auto& [name, e] : expected()) {
    CAPTURE(name);
    const GraphIR pre = shaped(load_model(model_path(name)));
    const GraphIR post = apply_fusion(pre);
    for (const GraphIR* ir : {&pre, &post}) {
      const TrafficReport r = model_traffic(*ir, DType::fp32());
      int64_t io = 0;
      for (const TrafficItem& item : r.items) {
        if (item.role == TrafficRole::kGraphInput || item.role == TrafficRole::kGraphOutput) io += item.total_bytes;
      }
      CHECK(r.grand_total >= r.weight_bytes + io);
      // No initializer is loaded twice.
      std::set<std::string> seen;
      for (const TrafficItem& item : r.items) {
        if (item.role == TrafficRole::kWeight) CHECK(seen.insert(item.tensor).second);
      }
    }
    const TrafficReport a = model_traffic(pre, DType::fp32());
    const TrafficReport b = model_traffic(post, DType::fp32());
    CHECK(b.grand_total <= a.grand_total);
    // Weight traffic equals the unfolded initializer bytes.
    int64_t weights = 0;
    for (const std::string& init : post.initializers) {
      const TensorSpec& t = post.tensor(init);
      if (!t.is_metadata && post.folded_initializers.count(init) == 0) weights += t.element_count() * 4;
    }
    CHECK(b.weight_bytes == weights);
  }
}

TEST_CASE("registry names resolve through a warm cache") {
  REQUIRE(corpus_dir());
  AnalysisOptions o;
  o.cache_dir = *corpus_dir();
  const ModelAnalysis a = analyze_model("squeezenet1.0", o);
  CHECK(a.summary.params == 1248424);
  CHECK(a.summary.param_bytes == 4993696);
}
