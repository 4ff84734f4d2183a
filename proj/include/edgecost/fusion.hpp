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

#include "edgecost/graph_ir.hpp"

namespace edgecost {

/// Absorbs every BatchNormalization whose input comes straight from a
/// Conv/Gemm with no other consumer. The absorbed node stays in the node list
/// (tagged), its parameter initializers are recorded as folded and the
/// anchor->BN tensor is marked not materialized.
GraphIR fold_batchnorm(const GraphIR& ir);

/// Absorbs Relu/LeakyRelu/Clip/Sigmoid/HardSigmoid/PRelu that directly
/// consume a Conv/Gemm (or folded Conv/Gemm+BN group) output with a single
/// consumer. The pre-activation tensor is marked not materialized.
GraphIR fuse_activations(const GraphIR& ir);

/// fold_batchnorm followed by fuse_activations.
GraphIR apply_fusion(const GraphIR& ir);

}  // namespace edgecost
