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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace edgecost {

/// ONNX TensorProto.DataType values.
enum class ElementType : int32_t {
  kUndefined = 0,
  kFloat = 1,
  kUint8 = 2,
  kInt8 = 3,
  kUint16 = 4,
  kInt16 = 5,
  kInt32 = 6,
  kInt64 = 7,
  kString = 8,
  kBool = 9,
  kFloat16 = 10,
  kDouble = 11,
  kUint32 = 12,
  kUint64 = 13,
  kComplex64 = 14,
  kComplex128 = 15,
  kBfloat16 = 16,
};

/// Storage width of one element, 0 for variable-width or unknown types.
int64_t element_byte_width(ElementType type);
bool is_floating(ElementType type);
std::string_view element_type_name(ElementType type);

/// A dimension as stored in a ValueInfoProto: either a concrete value or a
/// symbol such as "N". Both empty means the dimension is unknown.
struct Dim {
  std::optional<int64_t> value;
  std::string symbol;

  static Dim fixed(int64_t v) { return Dim{v, {}}; }
  static Dim symbolic(std::string s) { return Dim{std::nullopt, std::move(s)}; }
  bool is_fixed() const { return value.has_value(); }
  friend bool operator==(const Dim&, const Dim&) = default;
};

struct ValueInfo {
  std::string name;
  ElementType elem_type = ElementType::kUndefined;
  /// Absent when the file carries no shape for this value at all.
  std::optional<std::vector<Dim>> dims;
  friend bool operator==(const ValueInfo&, const ValueInfo&) = default;
};

/// Initializer metadata. The payload itself is never retained; only its byte
/// length. Small integer tensors keep their values because they carry shape
/// metadata (Reshape targets, Slice bounds, Gather indices).
struct TensorInfo {
  std::string name;
  ElementType elem_type = ElementType::kUndefined;
  std::vector<int64_t> dims;
  uint64_t payload_byte_length = 0;
  bool external = false;
  std::optional<std::vector<int64_t>> int_values;

  int64_t element_count() const;
  friend bool operator==(const TensorInfo&, const TensorInfo&) = default;
};

/// Integer tensors up to this many elements keep their values after loading.
inline constexpr int64_t kMaxRetainedIntElements = 4096;

using AttrValue = std::variant<int64_t, float, std::vector<int64_t>, std::string,
                               std::vector<float>, TensorInfo>;

struct RawNode {
  std::string name;
  std::string op_type;
  std::string domain;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, AttrValue> attributes;

  friend bool operator==(const RawNode&, const RawNode&) = default;
};

/// The subset of ModelProto the analyzer consumes.
struct RawModel {
  int64_t ir_version = 0;
  int64_t opset_version = 0;
  std::string graph_name;
  std::vector<RawNode> nodes;
  std::vector<TensorInfo> initializers;
  std::vector<ValueInfo> graph_inputs;
  std::vector<ValueInfo> graph_outputs;
  std::vector<ValueInfo> value_infos;

  friend bool operator==(const RawModel&, const RawModel&) = default;
};

/// Decodes a serialized ONNX ModelProto. Throws FileNotFound, MalformedFile
/// or UnsupportedModel.
RawModel load_model(const std::filesystem::path& path);

/// Decodes an in-memory ModelProto. External-data initializers are resolved
/// relative to `base_dir`.
RawModel parse_model(std::string_view bytes, const std::filesystem::path& base_dir = {});

}  // namespace edgecost
