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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgecost/model_io.hpp"

namespace edgecost {

/// Element type the analysis assumes for every activation and weight.
class DType {
 public:
  enum class Kind { kFP32, kFP16, kINT8 };

  constexpr DType() = default;
  constexpr explicit DType(Kind kind) : kind_(kind) {}

  static constexpr DType fp32() { return DType(Kind::kFP32); }
  static constexpr DType fp16() { return DType(Kind::kFP16); }
  static constexpr DType int8() { return DType(Kind::kINT8); }
  /// Accepts "fp32", "fp16", "int8" (case-insensitive).
  static DType parse(std::string_view text);

  constexpr Kind kind() const { return kind_; }
  constexpr int64_t byte_width() const {
    switch (kind_) {
      case Kind::kFP32: return 4;
      case Kind::kFP16: return 2;
      case Kind::kINT8: return 1;
    }
    return 4;
  }
  std::string_view name() const;

  friend constexpr bool operator==(DType, DType) = default;

 private:
  Kind kind_ = Kind::kFP32;
};

enum class TensorOrigin { kGraphInput, kInitializer, kNodeOutput, kGraphOutputAlias };

std::string_view to_string(TensorOrigin origin);

struct TensorSpec {
  std::string name;
  DType dtype;
  ElementType elem_type = ElementType::kUndefined;  // as stored in the file
  std::vector<int64_t> shape;
  bool has_shape = false;
  TensorOrigin origin = TensorOrigin::kNodeOutput;
  /// Integer-valued, or consumed only as operator configuration (Reshape
  /// target, Clip bounds, ...). Metadata never counts as weights,
  /// parameters or activation traffic.
  bool is_metadata = false;
  /// Cleared by fusion for tensors that stay in local memory.
  bool materialized = true;
  /// Known values of small integer tensors.
  std::optional<std::vector<int64_t>> int_values;
  /// Shape recorded in the file's value_info; symbolic dims act as wildcards.
  std::optional<std::vector<Dim>> stored_shape;

  int64_t element_count() const;
  /// Elements times the analysis dtype width (file width for metadata).
  int64_t byte_size() const;
};

/// Typed access to a node's attributes.
class Attributes {
 public:
  Attributes() = default;
  explicit Attributes(std::map<std::string, AttrValue> values) : values_(std::move(values)) {}

  bool has(const std::string& name) const { return values_.count(name) != 0; }
  int64_t get_int(const std::string& name, int64_t fallback) const;
  float get_float(const std::string& name, float fallback) const;
  std::string get_string(const std::string& name, const std::string& fallback) const;
  std::optional<std::vector<int64_t>> get_ints(const std::string& name) const;
  const AttrValue* find(const std::string& name) const;
  const std::map<std::string, AttrValue>& values() const { return values_; }

  friend bool operator==(const Attributes&, const Attributes&) = default;

 private:
  std::map<std::string, AttrValue> values_;
};

enum class FusionRole { kNone, kAnchor, kAbsorbed };

struct FusionTag {
  FusionRole role = FusionRole::kNone;
  int anchor = -1;  // id of the group anchor, -1 when unfused
  friend bool operator==(const FusionTag&, const FusionTag&) = default;
};

struct Node {
  int id = 0;
  std::string name;
  std::string op_type;
  std::vector<std::string> inputs;  // "" marks an omitted optional input
  std::vector<std::string> outputs;
  Attributes attrs;
  FusionTag fusion;

  const std::string& input(size_t i) const;
  bool has_input(size_t i) const { return i < inputs.size() && !inputs[i].empty(); }
  bool is_absorbed() const { return fusion.role == FusionRole::kAbsorbed; }
};

/// A Conv/Gemm anchor plus the nodes folded into it.
struct FusionGroup {
  int anchor = -1;
  std::vector<int> absorbed;  // BatchNormalization first (if any), then the activation
  std::string output;         // the only tensor of the group that reaches memory
  friend bool operator==(const FusionGroup&, const FusionGroup&) = default;
};

/// Validated, topologically ordered computation graph. Treated as immutable:
/// passes take it by const reference and return a new graph.
struct GraphIR {
  std::string name;
  int64_t opset = 0;
  int64_t batch = 1;
  DType dtype;
  std::vector<Node> nodes;  // nodes[i].id == i
  std::map<std::string, TensorSpec> tensors;
  std::set<std::string> initializers;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  /// Initializers whose contents were folded away (BatchNormalization params).
  std::set<std::string> folded_initializers;
  std::vector<FusionGroup> fusion_groups;
  bool shapes_inferred = false;
  bool fusion_applied = false;

  const TensorSpec& tensor(const std::string& name) const;
  bool is_graph_output(const std::string& name) const;
  bool is_graph_input(const std::string& name) const;
};

/// Producer/consumer lookup built once per graph.
class GraphIndex {
 public:
  explicit GraphIndex(const GraphIR& ir);

  /// Id of the node producing `tensor`, or nullopt for inputs/initializers.
  std::optional<int> producer(const std::string& tensor) const;
  std::span<const int> consumers(const std::string& tensor) const;
  /// Consumers plus one if the tensor is a graph output.
  size_t use_count(const std::string& tensor) const;
  /// Follows aliasing ops (Reshape, Flatten, Identity, ...) back to the
  /// tensor whose bytes they share.
  std::string alias_root(const std::string& tensor) const;

 private:
  const GraphIR* ir_;
  std::unordered_map<std::string, int> producer_;
  std::unordered_map<std::string, std::vector<int>> consumers_;
};

// Operator tables.
bool is_supported_op(std::string_view op_type);
/// Metadata-only ops whose outputs share their input's bytes.
bool is_alias_op(std::string_view op_type);
bool is_fusable_activation(std::string_view op_type);
/// False for input slots that carry operator configuration, not tensor data.
bool is_data_input(std::string_view op_type, size_t slot);

/// Builds the IR: lowers Constant nodes to initializers, checks operator
/// coverage and attributes, replaces symbolic batch dims with `batch` and
/// sorts nodes topologically (stable with respect to file order).
/// Throws UnsupportedOp, DanglingInput, CyclicGraph, InvalidAttribute.
GraphIR build_ir(const RawModel& raw, int64_t batch = 1, DType dtype = DType::fp32());

struct Violation {
  std::string kind;  // SingleProducer, Topological, DanglingInput, PositiveDims, ByteSize, UnknownTensor
  std::string subject;
  std::string message;
};

/// Checks the GraphIR invariants. Empty result iff all hold.
std::vector<Violation> validate(const GraphIR& ir);

/// Recomputes TensorSpec::is_metadata from element types and consumers.
void refresh_metadata_flags(GraphIR& ir);

/// Returns a copy with every data tensor re-typed to `dtype`.
GraphIR with_dtype(const GraphIR& ir, DType dtype);

std::string format_shape(std::span<const int64_t> shape);

}  // namespace edgecost
