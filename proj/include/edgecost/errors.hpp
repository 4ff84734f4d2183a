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

#include <stdexcept>
#include <string>

namespace edgecost {

/// Base class for every failure raised by the analyzer. `kind()` is a stable
/// identifier ("MalformedFile", "UnsupportedOp", ...) used in diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define EDGECOST_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(#Name, message) {}   \
  }

// model_io
EDGECOST_DEFINE_ERROR(FileNotFound);
EDGECOST_DEFINE_ERROR(MalformedFile);
EDGECOST_DEFINE_ERROR(UnsupportedModel);
EDGECOST_DEFINE_ERROR(UnknownModel);
EDGECOST_DEFINE_ERROR(NetworkError);
EDGECOST_DEFINE_ERROR(ChecksumMismatch);

// graph_ir
EDGECOST_DEFINE_ERROR(CyclicGraph);
EDGECOST_DEFINE_ERROR(DanglingInput);
EDGECOST_DEFINE_ERROR(UnsupportedOp);
EDGECOST_DEFINE_ERROR(InvalidAttribute);

// shape_infer
EDGECOST_DEFINE_ERROR(ShapeConflict);
EDGECOST_DEFINE_ERROR(RuleFailure);
EDGECOST_DEFINE_ERROR(MissingRule);

// cost_model
EDGECOST_DEFINE_ERROR(InvalidGroup);
EDGECOST_DEFINE_ERROR(MissingCostRule);

// hw_advisor
EDGECOST_DEFINE_ERROR(ZeroTraffic);
EDGECOST_DEFINE_ERROR(InvalidProfile);

#undef EDGECOST_DEFINE_ERROR

}  // namespace edgecost
