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

#include "edgecost/hw_advisor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edgecost/errors.hpp"

namespace edgecost {

void HardwareProfile::validate() const {
  const auto ok = [](double v) { return std::isfinite(v) && v > 0; };
  if (!ok(peak_compute)) throw InvalidProfile("profile '" + name + "': peak compute must be positive");
  if (!ok(mem_bandwidth)) throw InvalidProfile("profile '" + name + "': memory bandwidth must be positive");
}

const std::vector<HardwareProfile>& builtin_profiles() {
  static const std::vector<HardwareProfile> profiles = {
      {"edge-npu", 4.0e12, 25.6e9, "illustrative: generic edge NPU, LPDDR4x x32"},
      {"mobile-gpu", 1.2e12, 51.2e9, "illustrative: generic mobile GPU, LPDDR5 x64"},
      {"embedded-dsp", 1.0e11, 6.4e9, "illustrative: generic DSP, DDR3 x32"},
  };
  return profiles;
}

HardwareProfile parse_profile_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidProfile(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidProfile("profile must be a JSON object");
  const auto number = [&](const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end() || !it->is_number()) throw InvalidProfile(std::string("profile needs numeric '") + key + "'");
    return it->get<double>();
  };
  HardwareProfile profile;
  profile.name = doc.value("name", std::string("custom"));
  profile.peak_compute = number("peak_gflops") * 1e9;
  profile.mem_bandwidth = number("bandwidth_gbps") * 1e9;
  profile.note = doc.value("note", std::string());
  profile.validate();
  return profile;
}

HardwareProfile load_profile(const std::string& spec) {
  for (const HardwareProfile& p : builtin_profiles()) {
    if (p.name == spec) return p;
  }
  std::ifstream in(spec);
  if (!in) throw InvalidProfile("unknown profile '" + spec + "' (not a builtin name or readable file)");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_profile_json(text.str());
}

std::string_view to_string(Bound bound) { return bound == Bound::kCompute ? "compute" : "bandwidth"; }

double arithmetic_intensity(int64_t flops, int64_t bytes) {
  if (bytes <= 0) throw ZeroTraffic("arithmetic intensity undefined: model moves no bytes");
  return static_cast<double>(flops) / static_cast<double>(bytes);
}

Classification classify(int64_t flops, int64_t bytes, const HardwareProfile& profile, bool overlap) {
  profile.validate();
  Classification c;
  c.compute_time = static_cast<double>(flops) / profile.peak_compute;
  c.transfer_time = static_cast<double>(bytes) / profile.mem_bandwidth;
  // Cross-multiplied so the decision is the same one the ridge comparison
  // makes, without two separately rounded quotients.
  const long double lhs = static_cast<long double>(flops) * profile.mem_bandwidth;
  const long double rhs = static_cast<long double>(bytes) * profile.peak_compute;
  c.bound = lhs < rhs ? Bound::kBandwidth : Bound::kCompute;
  c.latency_floor = overlap ? std::max(c.compute_time, c.transfer_time) : c.compute_time + c.transfer_time;
  return c;
}

}  // namespace edgecost
