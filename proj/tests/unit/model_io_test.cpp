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

#include <fstream>

#include "edgecost/errors.hpp"
#include "edgecost/model_io.hpp"
#include "onnx_writer.hpp"

using namespace edgecost;
using namespace edgecost::testing;

namespace {

ModelBuilder single_relu() {
  ModelBuilder b("relu");
  b.input("x", {1, 8}).node("Relu", {"x"}, {"y"}).output("y", std::vector<int64_t>{1, 8});
  return b;
}

// Exercises every attribute kind plus integer and float initializers.
ModelBuilder rich_model() {
  ModelBuilder b("rich");
  TensorInfo value;
  value.name = "value";
  value.elem_type = ElementType::kInt64;
  value.dims = {2};
  value.payload_byte_length = 16;
  value.int_values = std::vector<int64_t>{1, -1};
  b.input("x", {-1, 3, 16, 16})
      .weight("w", {8, 3, 3, 3})
      .weight("bias", {8})
      .ints("shape", {1, -1})
      .node("Conv", {"x", "w", "bias"}, {"c"},
            {{"kernel_shape", std::vector<int64_t>{3, 3}},
             {"strides", std::vector<int64_t>{2, 2}},
             {"auto_pad", std::string("SAME_UPPER")},
             {"group", int64_t{1}}},
            "conv0")
      .node("LeakyRelu", {"c"}, {"r"}, {{"alpha", 0.125f}}, "act")
      .node("Constant", {}, {"k"}, {{"value", value}}, "const")
      .node("Reshape", {"r", "shape"}, {"flat"}, {}, "reshape")
      .node("Clip", {"flat", "", ""}, {"y"}, {{"scales", std::vector<float>{0.5f, 2.0f}}}, "clip")
      .value_info("c", {1, 8, 8, 8})
      .output("y");
  return b;
}

}  // namespace

TEST_CASE("a one-node Relu model loads with no initializers") {
  const RawModel m = parse_model(single_relu().bytes());
  CHECK(m.nodes.size() == 1);
  CHECK(m.nodes[0].op_type == "Relu");
  CHECK(m.initializers.empty());
  CHECK(m.opset_version == 13);
  REQUIRE(m.graph_inputs.size() == 1);
  REQUIRE(m.graph_inputs[0].dims.has_value());
  CHECK(m.graph_inputs[0].dims->at(1).value == 8);
}

TEST_CASE("truncated files fail to decode") {
  const std::string bytes = rich_model().bytes();
  CHECK_THROWS_AS(parse_model(bytes.substr(0, 10)), MalformedFile);
  // Every strict prefix is either malformed or, if it happens to end on a
  // field boundary before the graph, unsupported.
  for (size_t n = 1; n < bytes.size(); n += 7) {
    CHECK_THROWS_AS(parse_model(bytes.substr(0, n)), Error);
  }
}

TEST_CASE("round trip preserves structure exactly") {
  const ModelBuilder b = rich_model();
  const RawModel loaded = parse_model(b.bytes());
  CHECK(loaded == b.raw());

  REQUIRE(loaded.nodes.size() == 5);
  CHECK(loaded.nodes[0].name == "conv0");
  CHECK(std::get<std::string>(loaded.nodes[0].attributes.at("auto_pad")) == "SAME_UPPER");
  CHECK(std::get<float>(loaded.nodes[1].attributes.at("alpha")) == 0.125f);
  CHECK(std::get<TensorInfo>(loaded.nodes[2].attributes.at("value")).int_values == std::vector<int64_t>{1, -1});
  CHECK(loaded.graph_inputs[0].dims->at(0).symbol == "N");
  CHECK_FALSE(loaded.graph_inputs[0].dims->at(0).is_fixed());
  CHECK(loaded.nodes[4].inputs == std::vector<std::string>{"flat", "", ""});
}

TEST_CASE("initializer byte lengths come from the stored data") {
  const RawModel m = parse_model(rich_model().bytes());
  REQUIRE(m.initializers.size() == 3);
  CHECK(m.initializers[0].payload_byte_length == 8 * 3 * 3 * 3 * 4);
  CHECK_FALSE(m.initializers[0].int_values.has_value());
  CHECK(m.initializers[2].int_values == std::vector<int64_t>{1, -1});
}

TEST_CASE("payload length must agree with the declared shape") {
  ModelBuilder b = single_relu();
  RawModel raw = b.raw();
  TensorInfo bad;
  bad.name = "bad";
  bad.elem_type = ElementType::kFloat;
  bad.dims = {4, 4};
  bad.payload_byte_length = 60;
  raw.initializers.push_back(bad);
  CHECK_THROWS_AS(parse_model(serialize_model(raw)), MalformedFile);
}

TEST_CASE("graphs without nodes or without a graph are unsupported") {
  RawModel empty = single_relu().raw();
  empty.nodes.clear();
  CHECK_THROWS_AS(parse_model(serialize_model(empty)), UnsupportedModel);
  // ir_version only.
  CHECK_THROWS_AS(parse_model(std::string("\x08\x08", 2)), UnsupportedModel);
  RawModel old = single_relu().raw();
  old.opset_version = 6;
  CHECK_THROWS_AS(parse_model(serialize_model(old)), UnsupportedModel);
}

TEST_CASE("files are read from disk and missing files are reported") {
  TempDir dir;
  write_model(dir / "m.onnx", single_relu().raw());
  CHECK(load_model(dir / "m.onnx") == single_relu().raw());
  CHECK_THROWS_AS(load_model(dir / "missing.onnx"), FileNotFound);
  try {
    load_model(dir / "missing.onnx");
  } catch (const FileNotFound& e) {
    CHECK(std::string(e.what()).find("file not found") != std::string::npos);
  }
}

TEST_CASE("external data is sized from the declared length") {
  TempDir dir;
  ModelBuilder b = single_relu();
  RawModel raw = b.raw();
  TensorInfo ext;
  ext.name = "big";
  ext.elem_type = ElementType::kFloat;
  ext.dims = {16, 16};
  ext.payload_byte_length = 1024;
  ext.external = true;
  raw.initializers.push_back(ext);
  write_model(dir / "m.onnx", raw);

  CHECK_THROWS_AS(load_model(dir / "m.onnx"), MalformedFile);  // payload file absent
  {
    std::ofstream bin(dir / "big.bin", std::ios::binary);
    bin << std::string(1024, '\0');
  }
  const RawModel loaded = load_model(dir / "m.onnx");
  CHECK(loaded == raw);
  CHECK(loaded.initializers.back().payload_byte_length == 1024);
}

TEST_CASE("element widths") {
  CHECK(element_byte_width(ElementType::kFloat) == 4);
  CHECK(element_byte_width(ElementType::kFloat16) == 2);
  CHECK(element_byte_width(ElementType::kInt64) == 8);
  CHECK(element_byte_width(ElementType::kBool) == 1);
  CHECK(element_byte_width(ElementType::kString) == 0);
}
