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

namespace edgecost {

struct HardwareProfile {
  std::string name;
  double peak_compute = 0;   // FLOP/s
  double mem_bandwidth = 0;  // bytes/s
  std::string note;

  /// FLOPs per byte at which compute and transfer take equally long.
  double ridge_intensity() const { return peak_compute / mem_bandwidth; }
  /// Throws InvalidProfile unless both rates are finite and positive.
  void validate() const;
};

/// Generic example devices. Illustrative numbers, not measurements.
const std::vector<HardwareProfile>& builtin_profiles();

/// `spec` is either a builtin name or a JSON file
/// {"name": ..., "peak_gflops": ..., "bandwidth_gbps": ...}.
HardwareProfile load_profile(const std::string& spec);
HardwareProfile parse_profile_json(std::string_view text);

enum class Bound { kCompute, kBandwidth };
std::string_view to_string(Bound bound);

struct Classification {
  Bound bound = Bound::kCompute;
  double latency_floor = 0;  // seconds
  double compute_time = 0;
  double transfer_time = 0;
};

/// flops / bytes. Throws ZeroTraffic when bytes <= 0.
double arithmetic_intensity(int64_t flops, int64_t bytes);

/// Roofline lower bound. With overlap, transfers hide behind compute
/// (double buffering) and the floor is the larger of the two times;
/// without it they add. A tie is Compute-bound.
Classification classify(int64_t flops, int64_t bytes, const HardwareProfile& profile, bool overlap = true);

}  // namespace edgecost
