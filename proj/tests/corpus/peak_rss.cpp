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

// Loads one model and checks the process high-water mark stays under twice
// the file size. Usage: peak_rss <model.onnx>

#include <sys/resource.h>

#include <cstdio>
#include <filesystem>

#include "edgecost/model_io.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <model.onnx>\n", argv[0]);
    return 64;
  }
  const auto size = std::filesystem::file_size(argv[1]);
  const edgecost::RawModel raw = edgecost::load_model(argv[1]);
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak = static_cast<double>(usage.ru_maxrss) * 1024.0;
  std::printf("file %.1f MB, %zu initializers, peak RSS %.1f MB\n", size / 1e6, raw.initializers.size(), peak / 1e6);
  return peak < 2.0 * static_cast<double>(size) ? 0 : 1;
}
