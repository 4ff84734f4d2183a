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

#include "edgecost/bandwidth_model.hpp"

#include <algorithm>
#include <functional>

namespace edgecost {

std::string_view to_string(TrafficRole role) {
  switch (role) {
    case TrafficRole::kWeight: return "Weight";
    case TrafficRole::kGraphInput: return "GraphInput";
    case TrafficRole::kGraphOutput: return "GraphOutput";
    case TrafficRole::kIntermediate: return "Intermediate";
    case TrafficRole::kFused: return "Fused";
  }
  return "Intermediate";
}

int64_t tensor_bytes(const TensorSpec& spec, DType dtype) {
  if (spec.is_metadata) return spec.byte_size();
  return spec.element_count() * dtype.byte_width();
}

namespace {

// Everything that reads the bytes of `root`: real consumers (aliasing ops
// are looked through) and graph outputs reachable through aliases.
struct Uses {
  std::vector<int> consumers;
  std::vector<std::string> outputs;
};

Uses collect_uses(const GraphIR& ir, const GraphIndex& index, const std::string& root) {
  Uses uses;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (ir.is_graph_output(name)) uses.outputs.push_back(name);
    for (int id : index.consumers(name)) {
      const Node& node = ir.nodes[id];
      if (is_alias_op(node.op_type) && node.inputs[0] == name && !node.outputs.empty()) {
        visit(node.outputs[0]);
        // Dropout's mask and similar secondary outputs are not aliases.
      } else {
        uses.consumers.push_back(id);
      }
    }
  };
  visit(root);
  std::sort(uses.consumers.begin(), uses.consumers.end());
  uses.consumers.erase(std::unique(uses.consumers.begin(), uses.consumers.end()), uses.consumers.end());
  return uses;
}

class ReportBuilder {
 public:
  ReportBuilder(TrafficReport& report) : report_(report) {}

  void add(std::string tensor, TrafficRole role, int64_t bytes, int64_t multiplier, int charge_to) {
    TrafficItem item{std::move(tensor), role, bytes, multiplier, bytes * multiplier};
    if (role == TrafficRole::kWeight) {
      report_.weight_bytes += item.total_bytes;
    } else {
      report_.activation_bytes += item.total_bytes;
    }
    report_.grand_total += item.total_bytes;
    charge(charge_to, item.total_bytes);
    report_.items.push_back(std::move(item));
  }

  void charge(int node, int64_t bytes) {
    if (node >= 0) {
      report_.node_bytes[node] += bytes;
    } else {
      report_.unattributed_bytes += bytes;
    }
  }

 private:
  TrafficReport& report_;
};

}  // namespace

TrafficReport model_traffic(const GraphIR& ir, DType dtype, const TrafficOptions& options) {
  TrafficReport report;
  report.dtype = dtype;
  report.fused = ir.fusion_applied;
  report.per_consumer_reads = options.per_consumer_reads;
  report.node_bytes.assign(ir.nodes.size(), 0);
  ReportBuilder out(report);
  const GraphIndex index(ir);

  const auto first_or = [](const std::vector<int>& ids, int fallback) { return ids.empty() ? fallback : ids.front(); };
  const auto add_outputs = [&](const Uses& uses, int producer) {
    for (const std::string& name : uses.outputs) {
      out.add(name, TrafficRole::kGraphOutput, tensor_bytes(ir.tensor(name), dtype), 1, producer);
    }
  };

  for (const std::string& name : ir.inputs) {
    const TensorSpec& spec = ir.tensor(name);
    if (spec.is_metadata) continue;
    const Uses uses = collect_uses(ir, index, name);
    out.add(name, TrafficRole::kGraphInput, tensor_bytes(spec, dtype), 1, first_or(uses.consumers, -1));
    add_outputs(uses, first_or(uses.consumers, -1));
  }

  for (const std::string& name : ir.initializers) {
    const TensorSpec& spec = ir.tensor(name);
    if (spec.is_metadata || ir.folded_initializers.count(name) != 0) continue;
    const Uses uses = collect_uses(ir, index, name);
    if (uses.consumers.empty() && uses.outputs.empty()) continue;  // never loaded
    out.add(name, TrafficRole::kWeight, tensor_bytes(spec, dtype), 1, first_or(uses.consumers, -1));
  }

  for (const Node& node : ir.nodes) {
    for (size_t slot = 0; slot < node.outputs.size(); ++slot) {
      const std::string& name = node.outputs[slot];
      if (name.empty()) continue;
      if (slot == 0 && is_alias_op(node.op_type)) continue;  // shares its input's bytes
      const TensorSpec& spec = ir.tensor(name);
      if (spec.is_metadata) continue;
      const int64_t bytes = tensor_bytes(spec, dtype);
      const Uses uses = collect_uses(ir, index, name);
      if (!spec.materialized) {
        out.add(name, TrafficRole::kFused, bytes, 0, node.id);
        continue;
      }
      if (!uses.outputs.empty()) {
        add_outputs(uses, node.id);
        continue;
      }
      if (uses.consumers.empty()) continue;  // dead value, never written back
      const int64_t reads = options.per_consumer_reads ? static_cast<int64_t>(uses.consumers.size()) : 1;
      out.add(name, TrafficRole::kIntermediate, bytes, 1 + reads, uses.consumers.front());
      // Extra reads belong to the consumers that perform them.
      for (int64_t i = 1; i < reads; ++i) {
        out.charge(uses.consumers.front(), -bytes);
        out.charge(uses.consumers[i], bytes);
      }
    }
  }
  return report;
}

TrafficReport model_traffic(const GraphIR& ir, const TrafficOptions& options) {
  return model_traffic(ir, ir.dtype, options);
}

}  // namespace edgecost
