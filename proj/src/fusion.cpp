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

#include "edgecost/fusion.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace edgecost {

namespace {

bool is_anchor_op(const std::string& op) { return op == "Conv" || op == "Gemm"; }

std::map<int, FusionGroup> groups_by_anchor(const GraphIR& ir) {
  std::map<int, FusionGroup> groups;
  for (const FusionGroup& g : ir.fusion_groups) groups[g.anchor] = g;
  return groups;
}

void store_groups(GraphIR& ir, const std::map<int, FusionGroup>& groups) {
  ir.fusion_groups.clear();
  for (const auto& [anchor, g] : groups) ir.fusion_groups.push_back(g);
  ir.fusion_applied = true;
}

// Nodes reading `tensor` directly or through aliasing ops, excluding the
// aliasing ops themselves.
std::vector<int> real_consumers(const GraphIR& ir, const GraphIndex& index, const std::string& tensor) {
  std::vector<int> out;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    for (int id : index.consumers(name)) {
      const Node& node = ir.nodes[id];
      if (is_alias_op(node.op_type) && node.inputs[0] == name && !node.outputs.empty()) {
        visit(node.outputs[0]);
      } else {
        out.push_back(id);
      }
    }
  };
  visit(tensor);
  return out;
}

}  // namespace

GraphIR fold_batchnorm(const GraphIR& source) {
  GraphIR ir = source;
  const GraphIndex index(source);
  auto groups = groups_by_anchor(ir);

  for (Node& bn : ir.nodes) {
    if (bn.op_type != "BatchNormalization" || bn.is_absorbed() || !bn.has_input(0)) continue;
    const std::string& x = bn.inputs[0];
    const auto producer = index.producer(x);
    if (!producer) continue;
    Node& anchor = ir.nodes[*producer];
    if (!is_anchor_op(anchor.op_type) || anchor.is_absorbed() || index.use_count(x) != 1) continue;
    if (groups.count(anchor.id) != 0) continue;

    anchor.fusion = {FusionRole::kAnchor, anchor.id};
    bn.fusion = {FusionRole::kAbsorbed, anchor.id};
    ir.tensors.at(x).materialized = false;
    groups[anchor.id] = FusionGroup{anchor.id, {bn.id}, bn.outputs[0]};
  }

  // A parameter tensor is folded when every node that reads it is an
  // absorbed BatchNormalization reading it as scale/bias/mean/var.
  for (const std::string& init : ir.initializers) {
    const auto users = real_consumers(ir, index, init);
    if (users.empty() || ir.is_graph_output(init)) continue;
    const bool all_folded = std::all_of(users.begin(), users.end(), [&](int id) {
      const Node& n = ir.nodes[id];
      return n.op_type == "BatchNormalization" && n.is_absorbed() && index.alias_root(n.input(0)) != init;
    });
    if (all_folded) ir.folded_initializers.insert(init);
  }
  store_groups(ir, groups);
  return ir;
}

GraphIR fuse_activations(const GraphIR& source) {
  GraphIR ir = source;
  const GraphIndex index(source);
  auto groups = groups_by_anchor(ir);

  for (Node& act : ir.nodes) {
    if (!is_fusable_activation(act.op_type) || act.is_absorbed() || !act.has_input(0)) continue;
    const std::string& x = act.inputs[0];
    const auto producer = index.producer(x);
    if (!producer || index.use_count(x) != 1) continue;
    const Node& prev = ir.nodes[*producer];

    int anchor_id = -1;
    if (is_anchor_op(prev.op_type) && !prev.is_absorbed()) {
      anchor_id = prev.id;
    } else if (prev.op_type == "BatchNormalization" && prev.is_absorbed()) {
      anchor_id = prev.fusion.anchor;
    } else {
      continue;
    }
    auto it = groups.find(anchor_id);
    if (it != groups.end()) {
      const bool has_activation = std::any_of(it->second.absorbed.begin(), it->second.absorbed.end(),
                                              [&](int id) { return is_fusable_activation(ir.nodes[id].op_type); });
      if (has_activation || it->second.output != x) continue;
    }

    Node& anchor = ir.nodes[anchor_id];
    anchor.fusion = {FusionRole::kAnchor, anchor_id};
    act.fusion = {FusionRole::kAbsorbed, anchor_id};
    ir.tensors.at(x).materialized = false;
    FusionGroup& g = groups[anchor_id];
    g.anchor = anchor_id;
    g.absorbed.push_back(act.id);
    g.output = act.outputs[0];
  }
  store_groups(ir, groups);
  return ir;
}

GraphIR apply_fusion(const GraphIR& ir) { return fuse_activations(fold_batchnorm(ir)); }

}  // namespace edgecost
