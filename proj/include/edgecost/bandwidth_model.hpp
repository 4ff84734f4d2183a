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
#include <string>
#include <string_view>
#include <vector>

#include "edgecost/graph_ir.hpp"

namespace edgecost {

enum class TrafficRole { kWeight, kGraphInput, kGraphOutput, kIntermediate, kFused };

std::string_view to_string(TrafficRole role);

/// Bytes one tensor moves between system and local memory per inference.
struct TrafficItem {
  std::string tensor;
  TrafficRole role = TrafficRole::kIntermediate;
  int64_t bytes_each_way = 0;
  int64_t multiplier = 0;
  int64_t total_bytes = 0;
};

struct TrafficOptions {
  /// Charge one read per consuming node instead of a single read.
  bool per_consumer_reads = false;
};

struct TrafficReport {
  std::vector<TrafficItem> items;
  int64_t weight_bytes = 0;
  int64_t activation_bytes = 0;
  int64_t grand_total = 0;
  DType dtype;
  bool fused = false;
  bool per_consumer_reads = false;
  /// Bytes charged to each node (index = node id). A tensor is charged to
  /// its first consumer; graph outputs, having none, to their producer.
  std::vector<int64_t> node_bytes;
  /// Traffic with no node to charge (graph input passed straight out).
  int64_t unattributed_bytes = 0;
};

/// product(shape) * dtype width. Metadata tensors keep their file width.
int64_t tensor_bytes(const TensorSpec& spec, DType dtype);

/// Classifies every tensor of a shape-inferred IR:
///   initializers          Weight        x1 (folded BatchNormalization params excluded)
///   graph inputs          GraphInput    x1
///   graph outputs         GraphOutput   x1
///   fused tensors         Fused         x0
///   other node outputs    Intermediate  x2 (one write, one read)
/// Outputs of aliasing ops (Reshape, Flatten, ...) share their source's
/// bytes and add nothing. Integer/configuration tensors are ignored.
TrafficReport model_traffic(const GraphIR& ir, DType dtype, const TrafficOptions& options = {});

/// Same, using the IR's own dtype.
TrafficReport model_traffic(const GraphIR& ir, const TrafficOptions& options = {});

}  // namespace edgecost
