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

#include "edgecost/cost_model.hpp"

#include "edgecost/shape_infer.hpp"

#include <functional>
#include <numeric>
#include <set>

#include "edgecost/errors.hpp"

namespace edgecost {

namespace {

int64_t product(std::span<const int64_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), int64_t{1}, std::multiplies<>());
}

// True when `name` holds stored parameters (an initializer, possibly seen
// through Identity/Reshape-style aliases) rather than a computed activation.
bool is_parameter(const GraphIR& ir, const GraphIndex& index, const std::string& name) {
  if (name.empty()) return false;
  const std::string root = index.alias_root(name);
  return ir.initializers.count(root) != 0 && !ir.tensor(root).is_metadata;
}

int64_t parameter_elements(const Node& node, const GraphIR& ir, const GraphIndex& index, size_t first_slot) {
  int64_t total = 0;
  for (size_t i = first_slot; i < node.inputs.size(); ++i) {
    if (is_data_input(node.op_type, i) && is_parameter(ir, index, node.inputs[i])) {
      total += ir.tensor(node.inputs[i]).element_count();
    }
  }
  return total;
}

NodeCost scaled(NodeCost c, int64_t factor) {
  c.macs *= factor;
  c.flops *= factor;
  c.bias_flops *= factor;
  return c;
}

const std::set<std::string, std::less<>>& zero_cost_ops() {
  static const std::set<std::string, std::less<>> ops = {
      "Reshape", "Flatten", "Transpose", "Concat", "Squeeze", "Unsqueeze", "Pad", "Dropout",
      "Identity", "Split", "Slice", "Shape", "Gather", "Cast", "Constant", "MaxPool",
  };
  return ops;
}

}  // namespace

NodeCost conv_cost(const ConvDims& d, DType dtype) {
  if (d.c_in <= 0 || d.c_out <= 0 || d.h_out <= 0 || d.w_out <= 0 || d.h_k <= 0 || d.w_k <= 0) {
    throw InvalidGroup("conv dims must be positive");
  }
  if (d.group <= 0 || d.c_in % d.group != 0 || d.c_out % d.group != 0) {
    throw InvalidGroup("group " + std::to_string(d.group) + " does not divide C_in=" + std::to_string(d.c_in) +
                       " and C_out=" + std::to_string(d.c_out));
  }
  NodeCost c;
  const int64_t outputs = d.c_out * d.h_out * d.w_out;
  c.macs = (d.c_in / d.group) * d.h_out * d.w_out * d.c_out * d.h_k * d.w_k;
  c.bias_flops = d.has_bias ? outputs : 0;
  c.flops = 2 * c.macs + c.bias_flops;
  c.params = d.c_out * (d.c_in / d.group) * d.h_k * d.w_k + (d.has_bias ? d.c_out : 0);
  c.param_bytes = c.params * dtype.byte_width();
  return c;
}

NodeCost fc_cost(int64_t n_in, int64_t n_out, bool has_bias, DType dtype) {
  NodeCost c;
  c.macs = n_in * n_out;
  c.bias_flops = has_bias ? n_out : 0;
  c.flops = 2 * c.macs + c.bias_flops;
  c.params = n_in * n_out + (has_bias ? n_out : 0);
  c.param_bytes = c.params * dtype.byte_width();
  return c;
}

NodeCost avgpool_cost(int64_t channels, int64_t h_out, int64_t w_out, int64_t h_k, int64_t w_k) {
  NodeCost c;
  c.flops = channels * h_out * w_out * h_k * w_k;
  return c;
}

NodeCost eltwise_cost(std::span<const int64_t> output_shape, int64_t ops_per_element) {
  NodeCost c;
  c.flops = product(output_shape) * ops_per_element;
  return c;
}

namespace {

NodeCost node_cost_indexed(const Node& node, const GraphIR& ir, const GraphIndex& index) {
  NodeCost c;
  const std::string& op = node.op_type;
  const int64_t width = ir.dtype.byte_width();
  const auto in_shape = [&](size_t i) -> const Shape& { return ir.tensor(node.input(i)).shape; };
  const auto out_spec = [&]() -> const TensorSpec& { return ir.tensor(node.outputs.at(0)); };

  if (zero_cost_ops().count(op) != 0) {
    // no arithmetic
  } else if (op == "BatchNormalization" && node.is_absorbed()) {
    // folded into the anchor's weights offline
  } else if (out_spec().is_metadata) {
    // integer shape arithmetic (Shape -> Gather -> Mul chains)
  } else if (op == "Conv") {
    const Shape& x = in_shape(0);
    const Shape& w = in_shape(1);
    const Shape& y = out_spec().shape;
    ConvDims d;
    d.c_in = x[1];
    d.c_out = w[0];
    d.group = node.attrs.get_int("group", 1);
    d.h_out = product(std::span(y).subspan(2));
    d.w_out = 1;
    d.h_k = product(std::span(w).subspan(2));
    d.w_k = 1;
    d.has_bias = node.has_input(2);
    c = scaled(conv_cost(d, ir.dtype), x[0]);
    if (!is_parameter(ir, index, node.input(1))) c.params -= d.c_out * (d.c_in / d.group) * d.h_k;
    if (d.has_bias && !is_parameter(ir, index, node.input(2))) c.params -= d.c_out;
  } else if (op == "Gemm") {
    const Shape& b = in_shape(1);
    const Shape& y = out_spec().shape;
    const bool tb = node.attrs.get_int("transB", 0) != 0;
    const int64_t k = tb ? b[1] : b[0];
    const bool has_bias = node.has_input(2);
    c = scaled(fc_cost(k, y[1], has_bias, ir.dtype), y[0]);
    c.params = parameter_elements(node, ir, index, 1);
  } else if (op == "MatMul") {
    const Shape& a = in_shape(0);
    const Shape& y = out_spec().shape;
    const int64_t k = a.back();
    const int64_t n = in_shape(1).size() == 1 ? 1 : y.back();
    c = scaled(fc_cost(k, n, false, ir.dtype), product(y) / n);
    c.params = parameter_elements(node, ir, index, 0);
  } else if (op == "AveragePool") {
    const Shape& y = out_spec().shape;
    const auto kernel = node.attrs.get_ints("kernel_shape").value_or(std::vector<int64_t>{});
    c = scaled(avgpool_cost(y[1], product(std::span(y).subspan(2)), 1, product(kernel), 1), y[0]);
  } else if (op == "GlobalAveragePool") {
    const Shape& x = in_shape(0);
    c = scaled(avgpool_cost(x[1], 1, 1, product(std::span(x).subspan(2)), 1), x[0]);
  } else if (op == "ReduceMean") {
    c = eltwise_cost(in_shape(0));  // one accumulate per input element
  } else if (op == "Softmax") {
    c = eltwise_cost(out_spec().shape, kSoftmaxOpsPerElement);
  } else if (op == "LRN") {
    c = eltwise_cost(out_spec().shape, kLrnOpsPerElement);
  } else if (op == "BatchNormalization") {
    c = eltwise_cost(out_spec().shape, kBatchNormOpsPerElement);
    c.params = parameter_elements(node, ir, index, 1);
  } else if (op == "Add" || op == "Mul" || op == "Sub" || op == "Div" || is_fusable_activation(op)) {
    c = eltwise_cost(out_spec().shape);
    c.params = parameter_elements(node, ir, index, 0);
  } else {
    throw MissingCostRule(op + " (node '" + node.name + "') has no cost rule");
  }
  c.node_id = node.id;
  c.param_bytes = c.params * width;
  return c;
}

}  // namespace

NodeCost node_cost(const Node& node, const GraphIR& ir) { return node_cost_indexed(node, ir, GraphIndex(ir)); }

ModelCost model_cost(const GraphIR& ir) {
  ModelCost cost;
  cost.nodes.reserve(ir.nodes.size());
  const GraphIndex index(ir);
  for (const Node& node : ir.nodes) {
    NodeCost c = node_cost_indexed(node, ir, index);
    cost.totals.macs += c.macs;
    cost.totals.flops += c.flops;
    cost.totals.params += c.params;
    cost.totals.param_bytes += c.param_bytes;
    cost.nodes.push_back(c);
  }
  return cost;
}

}  // namespace edgecost
