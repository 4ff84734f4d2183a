#!/usr/bin/env python3
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
"""Builds an offline model cache from torchvision architectures.

Each registry model is exported to ONNX (opset 13, batch 1, 224x224x3 input)
with BatchNormalization nodes preserved, then run through the reference ONNX
shape inferencer so the file carries value_info for every intermediate. The
files land in the same cache layout `edgecost fetch` uses, with manifest
entries, so the CLI resolves zoo names without network access.

Parameters are filled with seeded uniform noise before export. torchvision's
default init leaves many tensors bit-identical (BN ones/zeros, zero biases)
and the exporter would deduplicate them, which undercounts parameters.
"""

import argparse
import datetime
import hashlib
import json
import os
import sys
import tempfile

MODELS = {
  "alexnet": lambda tv: tv.alexnet(weights=None),
  "vgg16": lambda tv: tv.vgg16(weights=None),
  "googlenet": lambda tv: tv.googlenet(weights=None, aux_logits=False, init_weights=False),
  "resnet18": lambda tv: tv.resnet18(weights=None),
  "resnet34": lambda tv: tv.resnet34(weights=None),
  "resnet50": lambda tv: tv.resnet50(weights=None),
  "resnet101": lambda tv: tv.resnet101(weights=None),
  "resnet152": lambda tv: tv.resnet152(weights=None),
  "densenet121": lambda tv: tv.densenet121(weights=None),
  "squeezenet1.0": lambda tv: tv.squeezenet1_0(weights=None),
  "mobilenetv2": lambda tv: tv.mobilenet_v2(weights=None),
  "shufflenetv2": lambda tv: tv.shufflenet_v2_x1_0(weights=None),
  "efficientnet-b0": lambda tv: tv.efficientnet_b0(weights=None),
}


def sha256_of(path):
  h = hashlib.sha256()
  with open(path, "rb") as f:
    for chunk in iter(lambda: f.read(1 << 20), b""):
      h.update(chunk)
  return h.hexdigest()


def load_manifest(cache_dir):
  path = os.path.join(cache_dir, "manifest.json")
  if os.path.exists(path):
    with open(path) as f:
      return json.load(f)
  return {}


def save_manifest(cache_dir, manifest):
  path = os.path.join(cache_dir, "manifest.json")
  fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".json")
  with os.fdopen(fd, "w") as f:
    json.dump(manifest, f, indent=2, sort_keys=True)
  os.replace(tmp, path)


def export(name, out_path):
  import onnx
  import torch
  import torchvision.models as tv

  torch.manual_seed(0)
  model = MODELS[name](tv).eval()
  with torch.no_grad():
    for tensor in model.state_dict().values():
      if tensor.is_floating_point():
        tensor.uniform_(0.5, 1.5)
  raw_path = out_path + ".raw"
  torch.onnx.export(
    model,
    torch.zeros(1, 3, 224, 224),
    raw_path,
    dynamo=False,
    opset_version=13,
    training=torch.onnx.TrainingMode.PRESERVE,
    do_constant_folding=True,
    input_names=["input"],
    output_names=["logits"],
  )
  onnx.shape_inference.infer_shapes_path(raw_path, out_path)
  os.remove(raw_path)


def main():
  parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
  parser.add_argument("--cache-dir", default=os.environ.get("EDGECOST_CACHE"))
  parser.add_argument("models", nargs="*", default=sorted(MODELS))
  args = parser.parse_args()
  if not args.cache_dir:
    parser.error("--cache-dir or EDGECOST_CACHE is required")
  os.makedirs(args.cache_dir, exist_ok=True)

  for name in args.models:
    if name not in MODELS:
      parser.error(f"unknown model {name!r}")
    path = os.path.join(args.cache_dir, name + ".onnx")
    manifest = load_manifest(args.cache_dir)
    entry = manifest.get(name)
    if entry and os.path.exists(path) and os.path.getsize(path) == entry["bytes"]:
      print(f"{name}: cached")
      continue
    print(f"{name}: exporting", flush=True)
    export(name, path)
    manifest = load_manifest(args.cache_dir)
    manifest[name] = {
      "url": f"torchvision://{name}",
      "sha256": sha256_of(path),
      "bytes": os.path.getsize(path),
      "fetched_at": datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
    }
    save_manifest(args.cache_dir, manifest)
  return 0


if __name__ == "__main__":
  sys.exit(main())
