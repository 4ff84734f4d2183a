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

#include <random>

#include "edgecost/errors.hpp"
#include "edgecost/shape_infer.hpp"
#include "fixtures.hpp"

using namespace edgecost;
using namespace edgecost::testing;

namespace {

using Ints = std::vector<int64_t>;

Shape one(std::string_view op, const std::vector<Shape>& inputs, std::map<std::string, AttrValue> attrs = {}) {
  const auto out = infer_node(op, inputs, Attributes(std::move(attrs)));
  REQUIRE(out.size() >= 1);
  return out[0];
}

}  // namespace

TEST_CASE("conv output size") {
  CHECK(one("Conv", {{1, 3, 224, 224}, {64, 3, 7, 7}},
            {{"strides", Ints{2, 2}}, {"pads", Ints{3, 3, 3, 3}}, {"kernel_shape", Ints{7, 7}}}) ==
        Shape{1, 64, 112, 112});
  // kernel_shape may be omitted; it comes from the weight.
  CHECK(one("Conv", {{1, 3, 8, 8}, {4, 3, 3, 3}}) == Shape{1, 4, 6, 6});
  CHECK(one("Conv", {{1, 3, 9, 9}, {4, 3, 3, 3}}, {{"auto_pad", std::string("SAME_UPPER")}, {"strides", Ints{2, 2}}}) ==
        Shape{1, 4, 5, 5});
  CHECK(one("Conv", {{1, 3, 9, 9}, {4, 3, 3, 3}}, {{"auto_pad", std::string("VALID")}, {"strides", Ints{2, 2}}}) ==
        Shape{1, 4, 4, 4});
  CHECK(one("Conv", {{1, 8, 10, 10}, {8, 1, 3, 3}}, {{"group", int64_t{8}}, {"dilations", Ints{2, 2}}}) ==
        Shape{1, 8, 6, 6});
  CHECK_THROWS_AS(one("Conv", {{1, 3, 8, 8}, {4, 2, 3, 3}}), RuleFailure);
}

TEST_CASE("pooling output size") {
  CHECK(one("MaxPool", {{1, 64, 112, 112}}, {{"kernel_shape", Ints{3, 3}}, {"strides", Ints{2, 2}}}) ==
        Shape{1, 64, 55, 55});
  // ceil_mode keeps the partial last window.
  CHECK(one("MaxPool", {{1, 64, 112, 112}}, {{"kernel_shape", Ints{3, 3}}, {"strides", Ints{2, 2}}, {"ceil_mode", int64_t{1}}}) ==
        Shape{1, 64, 56, 56});
  CHECK(one("GlobalAveragePool", {{1, 512, 7, 7}}) == Shape{1, 512, 1, 1});
  CHECK(one("AveragePool", {{1, 8, 6, 6}}, {{"kernel_shape", Ints{2, 2}}, {"strides", Ints{2, 2}}}) ==
        Shape{1, 8, 3, 3});
}

TEST_CASE("dense, broadcast and concat rules") {
  CHECK(one("Gemm", {{1, 9216}, {4096, 9216}, {4096}}, {{"transB", int64_t{1}}}) == Shape{1, 4096});
  CHECK(one("Gemm", {{1, 9216}, {9216, 4096}}) == Shape{1, 4096});
  CHECK(one("MatMul", {{1, 1280}, {1280, 1000}}) == Shape{1, 1000});
  CHECK(one("Add", {{1, 64, 56, 56}, {1, 64, 56, 56}}) == Shape{1, 64, 56, 56});
  CHECK(one("Mul", {{1, 32, 56, 56}, {1, 32, 1, 1}}) == Shape{1, 32, 56, 56});
  CHECK(one("Add", {{4}, {3, 1}}) == Shape{3, 4});
  CHECK_THROWS_AS(one("Add", {{1, 3}, {1, 4}}), RuleFailure);
  CHECK(one("Concat", {{1, 64, 28, 28}, {1, 32, 28, 28}}, {{"axis", int64_t{1}}}) == Shape{1, 96, 28, 28});
  CHECK(one("Concat", {{1, 64, 28, 28}, {1, 32, 28, 28}}, {{"axis", int64_t{-3}}}) == Shape{1, 96, 28, 28});
}

TEST_CASE("shape-only ops") {
  CHECK(one("Flatten", {{1, 256, 6, 6}}) == Shape{1, 9216});
  CHECK(one("Flatten", {{2, 3, 4}}, {{"axis", int64_t{0}}}) == Shape{1, 24});
  CHECK(one("Transpose", {{1, 2, 3, 4}}, {{"perm", Ints{0, 2, 3, 1}}}) == Shape{1, 3, 4, 2});
  CHECK(one("Transpose", {{1, 2, 3}}) == Shape{3, 2, 1});
  CHECK(one("Squeeze", {{1, 512, 1, 1}}, {{"axes", Ints{2, 3}}}) == Shape{1, 512});
  CHECK(one("Unsqueeze", {{1, 512}}, {{"axes", Ints{2, 3}}}) == Shape{1, 512, 1, 1});

  const std::vector<ShapeOperand> reshape{{{1, 2, 3, 4}, std::nullopt, true}, {{3}, Ints{0, -1, 4}, true}};
  const auto r = infer_node("Reshape", reshape, Attributes{});
  CHECK(r[0].shape == Shape{1, 6, 4});
}

TEST_CASE("integer shape arithmetic folds to constants") {
  const std::vector<ShapeOperand> x{{{1, 116, 28, 28}, std::nullopt, true}};
  const auto s = infer_node("Shape", x, Attributes{});
  REQUIRE(s[0].values);
  CHECK(*s[0].values == Ints{1, 116, 28, 28});

  const std::vector<ShapeOperand> gather{{{4}, s[0].values, true}, {{}, Ints{1}, true}};
  const auto g = infer_node("Gather", gather, Attributes{});
  CHECK(g[0].shape.empty());
  CHECK(*g[0].values == Ints{116});

  const std::vector<ShapeOperand> div{{{}, Ints{116}, true}, {{}, Ints{2}, true}};
  CHECK(*infer_node("Div", div, Attributes{})[0].values == Ints{58});
}

TEST_CASE("graph-level inference and stored-shape checks") {
  const GraphIR ir = shaped(conv_relu_chain().raw());
  CHECK(ir.shapes_inferred);
  CHECK(ir.tensor("c").shape == Shape{1, 4, 8, 8});
  CHECK(ir.tensor("y").shape == Shape{1, 4, 8, 8});

  ModelBuilder wrong = conv_relu_chain();
  wrong.value_info("c", {1, 4, 9, 9});
  CHECK_THROWS_AS(shaped(wrong.raw()), ShapeConflict);

  // An input override that changes the file's input skips the stored check.
  const GraphIR big = infer_shapes(build_ir(wrong.raw()), Shape{1, 3, 16, 16});
  CHECK(big.tensor("y").shape == Shape{1, 4, 16, 16});
}

TEST_CASE("open inputs default to 1x3x224x224") {
  ModelBuilder b;
  b.input("x", {-1, 3, -1, -1}).node("Relu", {"x"}, {"y"}).output("y");
  RawModel raw = b.raw();
  raw.graph_inputs[0].dims->at(2) = Dim::symbolic("H");
  raw.graph_inputs[0].dims->at(3) = Dim::symbolic("W");
  CHECK(shaped(raw).tensor("y").shape == kDefaultInputShape);
}

TEST_CASE("errors name the failing node") {
  ModelBuilder b;
  b.input("x", {1, 3, 4, 4})
      .weight("w", {4, 3, 7, 7})
      .node("Conv", {"x", "w"}, {"y"}, {}, "too_big")
      .output("y");
  try {
    shaped(b.raw());
    FAIL("expected RuleFailure");
  } catch (const RuleFailure& e) {
    CHECK(std::string(e.what()).find("too_big") != std::string::npos);
  }
}

TEST_CASE("conv and pool never grow past the padded input") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int64_t> dim(1, 32), k(1, 5), s(1, 3), p(0, 2);
  for (int i = 0; i < 500; ++i) {
    const int64_t h = dim(rng) + 5, w = dim(rng) + 5, kh = k(rng), kw = k(rng), st = s(rng), pad = p(rng);
    const Shape out = one("Conv", {{1, 2, h, w}, {3, 2, kh, kw}},
                          {{"strides", Ints{st, st}}, {"pads", Ints{pad, pad, pad, pad}}});
    CHECK(out[2] <= h + 2 * pad);
    CHECK(out[3] <= w + 2 * pad);
    const Shape pool = one("MaxPool", {{1, 2, h, w}}, {{"kernel_shape", Ints{kh, kw}}, {"strides", Ints{st, st}}});
    CHECK(pool[2] <= h);
    CHECK(pool[3] <= w);
  }
}
