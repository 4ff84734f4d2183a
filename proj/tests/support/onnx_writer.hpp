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

// Test-only ONNX encoder and a small builder for hand-made graphs.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgecost/model_io.hpp"

namespace edgecost::testing {

/// Encodes `model` as a ModelProto. Initializer payloads are written as
/// raw_data: int_values when present, zeros otherwise. External tensors
/// point at "<name>.bin" beside the model; the caller writes that file.
std::string serialize_model(const RawModel& model);

void write_model(const std::filesystem::path& path, const RawModel& model);

class ModelBuilder {
 public:
  explicit ModelBuilder(std::string graph_name = "graph", int64_t opset = 13);

  /// A negative dim becomes the symbol "N".
  ModelBuilder& input(const std::string& name, const std::vector<int64_t>& dims,
                      ElementType type = ElementType::kFloat);
  ModelBuilder& output(const std::string& name, std::optional<std::vector<int64_t>> dims = std::nullopt);
  ModelBuilder& weight(const std::string& name, const std::vector<int64_t>& dims,
                       ElementType type = ElementType::kFloat);
  /// 1-D int64 initializer holding `values`.
  ModelBuilder& ints(const std::string& name, const std::vector<int64_t>& values);
  ModelBuilder& value_info(const std::string& name, const std::vector<int64_t>& dims);
  ModelBuilder& node(const std::string& op, const std::vector<std::string>& inputs,
                     const std::vector<std::string>& outputs, std::map<std::string, AttrValue> attrs = {},
                     const std::string& name = "");

  const RawModel& raw() const { return model_; }
  std::string bytes() const { return serialize_model(model_); }

 private:
  RawModel model_;
};

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace edgecost::testing
