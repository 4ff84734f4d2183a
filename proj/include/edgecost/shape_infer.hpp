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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "edgecost/graph_ir.hpp"

namespace edgecost {

using Shape = std::vector<int64_t>;

/// One operand as seen by a shape rule. `values` is set for small integer
/// tensors whose contents are statically known (constants, Shape outputs).
struct ShapeOperand {
  Shape shape;
  std::optional<std::vector<int64_t>> values;
  bool present = true;

  static ShapeOperand absent() { return ShapeOperand{{}, std::nullopt, false}; }
};

struct ShapeResult {
  Shape shape;
  std::optional<std::vector<int64_t>> values;
};

/// Per-op shape rule. `num_outputs` is the node's output count (Split,
/// Dropout). Throws RuleFailure when attributes contradict the inputs and
/// MissingRule for ops without a rule.
std::vector<ShapeResult> infer_node(std::string_view op_type, std::span<const ShapeOperand> inputs,
                                    const Attributes& attrs, size_t num_outputs = 1, int64_t opset = 13);

/// Convenience form for ops whose rule depends on shapes only.
std::vector<Shape> infer_node(std::string_view op_type, const std::vector<Shape>& input_shapes,
                              const Attributes& attrs);

/// Default network input when the file leaves it open: 1x3x224x224.
inline const Shape kDefaultInputShape = {1, 3, 224, 224};

/// Propagates concrete shapes from the graph input through every node.
/// `input_override` replaces the first graph input's shape. Inferred shapes
/// are checked against value_info stored in the file (ShapeConflict on
/// mismatch) unless the override changes the input the file describes.
GraphIR infer_shapes(const GraphIR& ir, const std::optional<Shape>& input_override = std::nullopt);

}  // namespace edgecost
