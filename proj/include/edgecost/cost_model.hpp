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
#include <span>
#include <vector>

#include "edgecost/graph_ir.hpp"

namespace edgecost {

/// Compute and parameter cost of one node. For Conv/Gemm/MatMul,
/// flops == 2 * macs + bias_flops exactly.
struct NodeCost {
  int node_id = -1;
  int64_t macs = 0;
  int64_t flops = 0;
  int64_t bias_flops = 0;
  int64_t params = 0;
  int64_t param_bytes = 0;

  friend bool operator==(const NodeCost&, const NodeCost&) = default;
};

struct CostTotals {
  int64_t macs = 0;
  int64_t flops = 0;
  int64_t params = 0;
  int64_t param_bytes = 0;

  friend bool operator==(const CostTotals&, const CostTotals&) = default;
};

struct ModelCost {
  std::vector<NodeCost> nodes;  // one per IR node, in node order
  CostTotals totals;
};

struct ConvDims {
  int64_t c_in = 1;
  int64_t c_out = 1;
  int64_t h_out = 1;
  int64_t w_out = 1;
  int64_t h_k = 1;
  int64_t w_k = 1;
  int64_t group = 1;
  bool has_bias = false;
};

/// macs = (C_in/group) * H_out * W_out * C_out * H_k * W_k; the stride is
/// already reflected in H_out/W_out and is not divided out again.
/// Throws InvalidGroup when group does not divide both channel counts.
NodeCost conv_cost(const ConvDims& dims, DType dtype = DType::fp32());

/// Fully connected layer: macs = N_in * N_out.
NodeCost fc_cost(int64_t n_in, int64_t n_out, bool has_bias, DType dtype = DType::fp32());

/// Average pooling: one op per kernel tap per output element,
/// flops = C * H_out * W_out * H_k * W_k.
NodeCost avgpool_cost(int64_t channels, int64_t h_out, int64_t w_out, int64_t h_k, int64_t w_k);

/// Elementwise op over the (broadcast) output shape.
NodeCost eltwise_cost(std::span<const int64_t> output_shape, int64_t ops_per_element = 1);

/// Ops per output element charged to non-MAC operators.
inline constexpr int64_t kSoftmaxOpsPerElement = 5;
inline constexpr int64_t kLrnOpsPerElement = 5;
inline constexpr int64_t kBatchNormOpsPerElement = 2;

/// Dispatches one node of a shape-inferred IR to the rules above.
/// Parameter bytes use the IR's dtype. Folded BatchNormalization costs
/// nothing; fused activations keep their elementwise FLOPs.
NodeCost node_cost(const Node& node, const GraphIR& ir);

ModelCost model_cost(const GraphIR& ir);

}  // namespace edgecost
