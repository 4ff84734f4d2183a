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

#include "edgecost/graph_ir.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

#include "edgecost/errors.hpp"

namespace edgecost {

DType DType::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "fp32") return fp32();
  if (lower == "fp16") return fp16();
  if (lower == "int8") return int8();
  throw InvalidAttribute("unknown dtype '" + std::string(text) + "' (expected fp32, fp16 or int8)");
}

std::string_view DType::name() const {
  switch (kind_) {
    case Kind::kFP32: return "fp32";
    case Kind::kFP16: return "fp16";
    case Kind::kINT8: return "int8";
  }
  return "fp32";
}

std::string_view to_string(TensorOrigin origin) {
  switch (origin) {
    case TensorOrigin::kGraphInput: return "GraphInput";
    case TensorOrigin::kInitializer: return "Initializer";
    case TensorOrigin::kNodeOutput: return "NodeOutput";
    case TensorOrigin::kGraphOutputAlias: return "GraphOutputAlias";
  }
  return "NodeOutput";
}

int64_t TensorSpec::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), int64_t{1}, std::multiplies<>());
}

int64_t TensorSpec::byte_size() const {
  const int64_t width = is_metadata ? std::max<int64_t>(element_byte_width(elem_type), 1) : dtype.byte_width();
  return element_count() * width;
}

int64_t Attributes::get_int(const std::string& name, int64_t fallback) const {
  const AttrValue* v = find(name);
  if (v == nullptr) return fallback;
  if (const auto* i = std::get_if<int64_t>(v)) return *i;
  throw InvalidAttribute("attribute '" + name + "' is not an integer");
}

float Attributes::get_float(const std::string& name, float fallback) const {
  const AttrValue* v = find(name);
  if (v == nullptr) return fallback;
  if (const auto* f = std::get_if<float>(v)) return *f;
  if (const auto* i = std::get_if<int64_t>(v)) return static_cast<float>(*i);
  throw InvalidAttribute("attribute '" + name + "' is not a float");
}

std::string Attributes::get_string(const std::string& name, const std::string& fallback) const {
  const AttrValue* v = find(name);
  if (v == nullptr) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw InvalidAttribute("attribute '" + name + "' is not a string");
}

std::optional<std::vector<int64_t>> Attributes::get_ints(const std::string& name) const {
  const AttrValue* v = find(name);
  if (v == nullptr) return std::nullopt;
  if (const auto* ints = std::get_if<std::vector<int64_t>>(v)) return *ints;
  if (const auto* i = std::get_if<int64_t>(v)) return std::vector<int64_t>{*i};
  throw InvalidAttribute("attribute '" + name + "' is not an integer list");
}

const AttrValue* Attributes::find(const std::string& name) const {
  const auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

const std::string& Node::input(size_t i) const {
  static const std::string kNone;
  return i < inputs.size() ? inputs[i] : kNone;
}

const TensorSpec& GraphIR::tensor(const std::string& tensor_name) const {
  const auto it = tensors.find(tensor_name);
  if (it == tensors.end()) {
    throw DanglingInput("tensor '" + tensor_name + "' is not in the tensor table");
  }
  return it->second;
}

bool GraphIR::is_graph_output(const std::string& tensor_name) const {
  return std::find(outputs.begin(), outputs.end(), tensor_name) != outputs.end();
}

bool GraphIR::is_graph_input(const std::string& tensor_name) const {
  return std::find(inputs.begin(), inputs.end(), tensor_name) != inputs.end();
}

GraphIndex::GraphIndex(const GraphIR& ir) : ir_(&ir) {
  for (const Node& node : ir.nodes) {
    for (const std::string& out : node.outputs) {
      if (!out.empty()) producer_.emplace(out, node.id);
    }
    for (const std::string& in : node.inputs) {
      if (in.empty()) continue;
      auto& list = consumers_[in];
      if (list.empty() || list.back() != node.id) list.push_back(node.id);
    }
  }
}

std::optional<int> GraphIndex::producer(const std::string& tensor) const {
  const auto it = producer_.find(tensor);
  if (it == producer_.end()) return std::nullopt;
  return it->second;
}

std::span<const int> GraphIndex::consumers(const std::string& tensor) const {
  const auto it = consumers_.find(tensor);
  if (it == consumers_.end()) return {};
  return it->second;
}

size_t GraphIndex::use_count(const std::string& tensor) const {
  return consumers(tensor).size() + (ir_->is_graph_output(tensor) ? 1 : 0);
}

std::string GraphIndex::alias_root(const std::string& tensor) const {
  std::string current = tensor;
  for (;;) {
    const auto p = producer(current);
    if (!p) return current;
    const Node& node = ir_->nodes[*p];
    if (!is_alias_op(node.op_type) || node.outputs.empty() || node.outputs[0] != current ||
        !node.has_input(0)) {
      return current;
    }
    current = node.inputs[0];
  }
}

namespace {

const std::set<std::string, std::less<>>& supported_ops() {
  static const std::set<std::string, std::less<>> ops = {
      "Conv", "Gemm", "MatMul", "BatchNormalization", "Relu", "LeakyRelu", "Clip", "Sigmoid",
      "HardSigmoid", "PRelu", "MaxPool", "AveragePool", "GlobalAveragePool", "Add", "Mul", "Sub",
      "Div", "Concat", "Flatten", "Reshape", "Transpose", "Squeeze", "Unsqueeze", "Softmax",
      "Dropout", "Identity", "LRN", "Pad", "ReduceMean", "Split", "Slice", "Constant", "Shape",
      "Gather", "Cast",
  };
  return ops;
}

TensorInfo lower_constant(const RawNode& node) {
  TensorInfo t;
  t.name = node.outputs.front();
  const auto& attrs = node.attributes;
  if (auto it = attrs.find("value"); it != attrs.end()) {
    if (const auto* tensor = std::get_if<TensorInfo>(&it->second)) {
      t = *tensor;
      t.name = node.outputs.front();
      return t;
    }
  }
  if (auto it = attrs.find("value_int"); it != attrs.end()) {
    t.elem_type = ElementType::kInt64;
    t.int_values = std::vector<int64_t>{std::get<int64_t>(it->second)};
  } else if (auto it2 = attrs.find("value_ints"); it2 != attrs.end()) {
    t.elem_type = ElementType::kInt64;
    t.int_values = std::get<std::vector<int64_t>>(it2->second);
    t.dims = {static_cast<int64_t>(t.int_values->size())};
  } else if (auto it3 = attrs.find("value_float"); it3 != attrs.end()) {
    t.elem_type = ElementType::kFloat;
  } else if (auto it4 = attrs.find("value_floats"); it4 != attrs.end()) {
    t.elem_type = ElementType::kFloat;
    t.dims = {static_cast<int64_t>(std::get<std::vector<float>>(it4->second).size())};
  } else {
    throw UnsupportedOp("Constant node '" + node.name + "' has no supported value attribute");
  }
  t.payload_byte_length = static_cast<uint64_t>(t.element_count() * element_byte_width(t.elem_type));
  return t;
}

std::string describe(const RawNode& node) {
  return "'" + (node.name.empty() ? node.outputs.front() : node.name) + "' (" + node.op_type + ")";
}

void check_positive(const RawNode& node, const Attributes& attrs, const char* key) {
  if (auto values = attrs.get_ints(key)) {
    for (int64_t v : *values) {
      if (v <= 0) {
        throw InvalidAttribute("node " + describe(node) + ": " + key + " must be positive");
      }
    }
  }
}

void check_nonnegative(const RawNode& node, const Attributes& attrs, const char* key) {
  if (auto values = attrs.get_ints(key)) {
    for (int64_t v : *values) {
      if (v < 0) {
        throw InvalidAttribute("node " + describe(node) + ": " + key + " must be non-negative");
      }
    }
  }
}

void validate_attributes(const RawNode& node, const Attributes& attrs) {
  const std::string& op = node.op_type;
  if (op == "Conv" || op == "MaxPool" || op == "AveragePool") {
    check_positive(node, attrs, "kernel_shape");
    check_positive(node, attrs, "strides");
    check_positive(node, attrs, "dilations");
    check_nonnegative(node, attrs, "pads");
    const std::string auto_pad = attrs.get_string("auto_pad", "NOTSET");
    if (auto_pad != "NOTSET" && auto_pad != "SAME_UPPER" && auto_pad != "SAME_LOWER" && auto_pad != "VALID") {
      throw InvalidAttribute("node " + describe(node) + ": unknown auto_pad '" + auto_pad + "'");
    }
  }
  if (op == "Conv" && attrs.get_int("group", 1) < 1) {
    throw InvalidAttribute("node " + describe(node) + ": group must be >= 1");
  }
  if ((op == "MaxPool" || op == "AveragePool") && !attrs.has("kernel_shape")) {
    throw InvalidAttribute("node " + describe(node) + ": kernel_shape is required");
  }
  if (op == "Gemm") {
    for (const char* key : {"transA", "transB"}) {
      const int64_t v = attrs.get_int(key, 0);
      if (v != 0 && v != 1) {
        throw InvalidAttribute("node " + describe(node) + ": " + key + " must be 0 or 1");
      }
    }
  }
  if (op == "Concat" && !attrs.has("axis")) {
    throw InvalidAttribute("node " + describe(node) + ": axis is required");
  }
}

ElementType output_elem_type(const Node& node, size_t slot, const GraphIR& ir) {
  if (node.op_type == "Shape") return ElementType::kInt64;
  if (node.op_type == "Cast") return static_cast<ElementType>(node.attrs.get_int("to", 1));
  if (node.op_type == "Dropout" && slot == 1) return ElementType::kBool;
  for (const std::string& in : node.inputs) {
    if (!in.empty()) return ir.tensor(in).elem_type;
  }
  return ElementType::kFloat;
}

}  // namespace

bool is_supported_op(std::string_view op_type) { return supported_ops().count(op_type) != 0; }

bool is_alias_op(std::string_view op) {
  return op == "Reshape" || op == "Flatten" || op == "Squeeze" || op == "Unsqueeze" || op == "Transpose" ||
         op == "Identity" || op == "Dropout";
}

bool is_fusable_activation(std::string_view op) {
  return op == "Relu" || op == "LeakyRelu" || op == "Clip" || op == "Sigmoid" || op == "HardSigmoid" ||
         op == "PRelu";
}

bool is_data_input(std::string_view op, size_t slot) {
  if (slot == 0) return true;
  if (op == "Reshape" || op == "Squeeze" || op == "Unsqueeze" || op == "Split" || op == "ReduceMean" ||
      op == "Gather") {
    return false;
  }
  if (op == "Clip" || op == "Slice" || op == "Pad") return false;
  return true;
}

void refresh_metadata_flags(GraphIR& ir) {
  const GraphIndex index(ir);
  for (auto& [name, spec] : ir.tensors) {
    if (!is_floating(spec.elem_type) && spec.elem_type != ElementType::kUndefined) {
      spec.is_metadata = true;
      continue;
    }
    const auto consumers = index.consumers(name);
    if (consumers.empty() || ir.is_graph_output(name)) {
      spec.is_metadata = false;
      continue;
    }
    bool any_data_use = false;
    for (int id : consumers) {
      const Node& node = ir.nodes[id];
      for (size_t slot = 0; slot < node.inputs.size(); ++slot) {
        if (node.inputs[slot] == name && is_data_input(node.op_type, slot)) any_data_use = true;
      }
    }
    spec.is_metadata = !any_data_use;
  }
}

GraphIR build_ir(const RawModel& raw, int64_t batch, DType dtype) {
  if (batch < 1) {
    throw InvalidAttribute("batch must be positive");
  }
  GraphIR ir;
  ir.name = raw.graph_name;
  ir.opset = raw.opset_version;
  ir.batch = batch;
  ir.dtype = dtype;

  std::vector<TensorInfo> initializers = raw.initializers;
  std::vector<const RawNode*> kept;
  for (const RawNode& node : raw.nodes) {
    if (!node.domain.empty() && node.domain != "ai.onnx") {
      throw UnsupportedOp("node " + describe(node) + " is in custom domain '" + node.domain + "'");
    }
    if (!is_supported_op(node.op_type)) {
      throw UnsupportedOp("node " + describe(node) + " uses an operator outside the supported set");
    }
    if (node.op_type == "Constant") {
      initializers.push_back(lower_constant(node));
    } else {
      kept.push_back(&node);
    }
  }

  std::set<std::string> available;
  for (const TensorInfo& t : initializers) {
    ir.initializers.insert(t.name);
    available.insert(t.name);
  }
  for (const ValueInfo& vi : raw.graph_inputs) {
    if (ir.initializers.count(vi.name) == 0) {
      ir.inputs.push_back(vi.name);
      available.insert(vi.name);
    }
  }

  std::map<std::string, size_t> producer_of;
  for (size_t i = 0; i < kept.size(); ++i) {
    for (const std::string& out : kept[i]->outputs) {
      if (out.empty()) continue;
      if (available.count(out) != 0 || !producer_of.emplace(out, i).second) {
        throw UnsupportedModel("tensor '" + out + "' has more than one producer");
      }
    }
  }
  for (const RawNode* node : kept) {
    for (const std::string& in : node->inputs) {
      if (!in.empty() && available.count(in) == 0 && producer_of.count(in) == 0) {
        throw DanglingInput(in);
      }
    }
  }
  for (const ValueInfo& out : raw.graph_outputs) {
    if (available.count(out.name) == 0 && producer_of.count(out.name) == 0) {
      throw DanglingInput(out.name);
    }
  }

  // Kahn's algorithm; the min-heap over file positions keeps independent
  // nodes in their original order.
  std::vector<int> pending(kept.size(), 0);
  std::vector<std::vector<size_t>> users(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    std::set<size_t> deps;
    for (const std::string& in : kept[i]->inputs) {
      if (auto it = producer_of.find(in); it != producer_of.end()) deps.insert(it->second);
    }
    pending[i] = static_cast<int>(deps.size());
    for (size_t d : deps) users[d].push_back(i);
  }
  std::priority_queue<size_t, std::vector<size_t>, std::greater<>> ready;
  for (size_t i = 0; i < kept.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<size_t> order;
  while (!ready.empty()) {
    const size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (size_t u : users[i]) {
      if (--pending[u] == 0) ready.push(u);
    }
  }
  if (order.size() != kept.size()) {
    for (size_t i = 0; i < kept.size(); ++i) {
      if (pending[i] > 0) {
        throw CyclicGraph("cycle through node " + describe(*kept[i]));
      }
    }
  }

  std::map<std::string, const ValueInfo*> stored;
  for (const ValueInfo& vi : raw.value_infos) stored[vi.name] = &vi;
  for (const ValueInfo& vi : raw.graph_outputs) stored[vi.name] = &vi;

  for (const TensorInfo& t : initializers) {
    TensorSpec spec;
    spec.name = t.name;
    spec.dtype = dtype;
    spec.elem_type = t.elem_type;
    spec.shape = t.dims;
    spec.has_shape = true;
    spec.origin = TensorOrigin::kInitializer;
    spec.int_values = t.int_values;
    ir.tensors[t.name] = std::move(spec);
  }
  for (const ValueInfo& vi : raw.graph_inputs) {
    if (ir.initializers.count(vi.name) != 0) continue;
    TensorSpec spec;
    spec.name = vi.name;
    spec.dtype = dtype;
    spec.elem_type = vi.elem_type;
    spec.origin = TensorOrigin::kGraphInput;
    if (vi.dims) {
      spec.has_shape = true;
      for (size_t d = 0; d < vi.dims->size(); ++d) {
        const Dim& dim = (*vi.dims)[d];
        if (dim.is_fixed() && !(d == 0 && *dim.value <= 0)) {
          spec.shape.push_back(*dim.value);
        } else if (d == 0) {
          spec.shape.push_back(batch);  // symbolic batch
        } else {
          spec.has_shape = false;
          spec.shape.push_back(-1);
        }
      }
    }
    ir.tensors[vi.name] = std::move(spec);
  }

  for (size_t position : order) {
    const RawNode& raw_node = *kept[position];
    Node node;
    node.id = static_cast<int>(ir.nodes.size());
    node.name = raw_node.name.empty() ? raw_node.op_type + "_" + std::to_string(node.id) : raw_node.name;
    node.op_type = raw_node.op_type;
    node.inputs = raw_node.inputs;
    node.outputs = raw_node.outputs;
    node.attrs = Attributes(raw_node.attributes);
    validate_attributes(raw_node, node.attrs);
    for (size_t slot = 0; slot < node.outputs.size(); ++slot) {
      const std::string& out = node.outputs[slot];
      if (out.empty()) continue;
      TensorSpec spec;
      spec.name = out;
      spec.dtype = dtype;
      spec.elem_type = output_elem_type(node, slot, ir);
      spec.origin = TensorOrigin::kNodeOutput;
      if (auto it = stored.find(out); it != stored.end() && it->second->dims) {
        spec.stored_shape = *it->second->dims;
      }
      ir.tensors[out] = std::move(spec);
    }
    ir.nodes.push_back(std::move(node));
  }

  for (const ValueInfo& out : raw.graph_outputs) {
    ir.outputs.push_back(out.name);
    auto& spec = ir.tensors.at(out.name);
    if (spec.origin != TensorOrigin::kNodeOutput) spec.origin = TensorOrigin::kGraphOutputAlias;
  }
  refresh_metadata_flags(ir);
  return ir;
}

std::vector<Violation> validate(const GraphIR& ir) {
  std::vector<Violation> out;
  std::map<std::string, int> producers;
  for (const std::string& name : ir.initializers) ++producers[name];
  for (const std::string& name : ir.inputs) ++producers[name];
  for (const Node& node : ir.nodes) {
    for (const std::string& o : node.outputs) {
      if (!o.empty()) ++producers[o];
    }
  }
  for (const auto& [name, count] : producers) {
    if (count > 1) {
      out.push_back({"SingleProducer", name, "tensor '" + name + "' has " + std::to_string(count) + " producers"});
    }
  }

  std::set<std::string> seen(ir.initializers.begin(), ir.initializers.end());
  seen.insert(ir.inputs.begin(), ir.inputs.end());
  for (size_t i = 0; i < ir.nodes.size(); ++i) {
    const Node& node = ir.nodes[i];
    if (node.id != static_cast<int>(i)) {
      out.push_back({"Topological", node.name, "node id " + std::to_string(node.id) + " at position " +
                                                   std::to_string(i)});
    }
    for (const std::string& in : node.inputs) {
      if (in.empty() || seen.count(in) != 0) continue;
      if (producers.count(in) != 0) {
        out.push_back({"Topological", node.name, "input '" + in + "' is produced after node '" + node.name + "'"});
      } else {
        out.push_back({"DanglingInput", in, "node '" + node.name + "' consumes '" + in + "' which nothing produces"});
      }
    }
    for (const std::string& o : node.outputs) {
      if (o.empty()) continue;
      seen.insert(o);
      if (ir.tensors.count(o) == 0) {
        out.push_back({"UnknownTensor", o, "output '" + o + "' of '" + node.name + "' missing from tensor table"});
      }
    }
  }

  for (const auto& [name, spec] : ir.tensors) {
    if (!spec.has_shape) continue;
    for (int64_t d : spec.shape) {
      if (d <= 0) {
        out.push_back({"PositiveDims", name, "tensor '" + name + "' has non-positive dim in " +
                                                 format_shape(spec.shape)});
        break;
      }
    }
  }
  return out;
}

GraphIR with_dtype(const GraphIR& ir, DType dtype) {
  GraphIR out = ir;
  out.dtype = dtype;
  for (auto& [name, spec] : out.tensors) spec.dtype = dtype;
  return out;
}

std::string format_shape(std::span<const int64_t> shape) {
  if (shape.empty()) return "[]";
  std::string s;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

}  // namespace edgecost
