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

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "edgecost/fusion.hpp"
#include "edgecost/graph_ir.hpp"
#include "edgecost/shape_infer.hpp"
#include "onnx_writer.hpp"

namespace edgecost::testing {

inline GraphIR shaped(const RawModel& raw, DType dtype = DType::fp32()) {
  return infer_shapes(build_ir(raw, 1, dtype));
}

inline GraphIR fused(const RawModel& raw, DType dtype = DType::fp32()) { return apply_fusion(shaped(raw, dtype)); }

/// input 1x3x8x8 -> Conv(4x3x3x3, pad 1, no bias) -> Relu -> output 1x4x8x8
inline ModelBuilder conv_relu_chain() {
  ModelBuilder b("chain");
  b.input("x", {1, 3, 8, 8})
      .weight("w", {4, 3, 3, 3})
      .node("Conv", {"x", "w"}, {"c"}, {{"kernel_shape", std::vector<int64_t>{3, 3}}, {"pads", std::vector<int64_t>{1, 1, 1, 1}}},
            "conv")
      .node("Relu", {"c"}, {"y"}, {}, "relu")
      .output("y", std::vector<int64_t>{1, 4, 8, 8});
  return b;
}

/// Directory holding the exported model corpus, from EDGECOST_CORPUS.
inline std::optional<std::filesystem::path> corpus_dir() {
  const char* env = std::getenv("EDGECOST_CORPUS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

}  // namespace edgecost::testing
