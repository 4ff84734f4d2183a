# Copyright 2026 The EdgeCost Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Static FLOP, parameter and memory-traffic analysis of ONNX CNN models."""

import json

from edgecost._edgecost import (
    CSV_HEADER,
    SCHEMA_VERSION,
    Error,
    arithmetic_intensity,
    classify,
    fetch,
    profiles,
    registry,
)
from edgecost import _edgecost

__all__ = [
    "CSV_HEADER",
    "SCHEMA_VERSION",
    "Error",
    "analyze",
    "arithmetic_intensity",
    "classify",
    "compare",
    "fetch",
    "profiles",
    "registry",
]


def analyze(model, **options):
  """Per-layer report and totals for one model file or registry name, as a dict."""
  return json.loads(_edgecost.analyze_json(str(model), **options))


def compare(models, format="json", **options):
  """Summary rows for several models. JSON comes back parsed; csv and svg as text."""
  text = _edgecost.compare([str(m) for m in models], format=format, **options)
  return json.loads(text) if format == "json" else text
