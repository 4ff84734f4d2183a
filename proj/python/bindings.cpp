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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "edgecost/errors.hpp"
#include "edgecost/hw_advisor.hpp"
#include "edgecost/report.hpp"
#include "edgecost/zoo.hpp"

namespace py = pybind11;
using namespace edgecost;

namespace {

AnalysisOptions make_options(const std::string& dtype, bool fusion, bool per_consumer_reads,
                             const std::optional<std::vector<int64_t>>& input_shape,
                             const std::optional<std::string>& profile, bool overlap,
                             const std::optional<std::string>& cache_dir) {
  AnalysisOptions o;
  o.dtype = DType::parse(dtype);
  o.fusion = fusion;
  o.per_consumer_reads = per_consumer_reads;
  o.input_shape = input_shape;
  if (profile) o.profile = load_profile(*profile);
  o.overlap = overlap;
  o.cache_dir = cache_dir ? std::filesystem::path(*cache_dir) : default_cache_dir();
  return o;
}

}  // namespace

PYBIND11_MODULE(_edgecost, m) {
  m.doc() = "Static FLOP, parameter and memory-traffic analysis of ONNX CNNs";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.attr("SCHEMA_VERSION") = kSchemaVersion;
  m.attr("CSV_HEADER") = kComparisonCsvHeader;

  m.def(
      "analyze_json",
      [](const std::string& model, const std::string& dtype, bool fusion, bool per_consumer_reads,
         std::optional<std::vector<int64_t>> input_shape, std::optional<std::string> profile, bool overlap,
         std::optional<std::string> cache_dir) {
        const AnalysisOptions o =
            make_options(dtype, fusion, per_consumer_reads, input_shape, profile, overlap, cache_dir);
        py::gil_scoped_release release;
        return format_analysis_json(analyze_model(model, o));
      },
      py::arg("model"), py::arg("dtype") = "fp32", py::arg("fusion") = true, py::arg("per_consumer_reads") = false,
      py::arg("input_shape") = py::none(), py::arg("profile") = py::none(), py::arg("overlap") = true,
      py::arg("cache_dir") = py::none());

  m.def(
      "compare",
      [](const std::vector<std::string>& models, const std::string& format, const std::string& dtype, bool fusion,
         bool per_consumer_reads, std::optional<std::vector<int64_t>> input_shape,
         std::optional<std::string> profile, bool overlap, std::optional<std::string> cache_dir) {
        const AnalysisOptions o =
            make_options(dtype, fusion, per_consumer_reads, input_shape, profile, overlap, cache_dir);
        if (format != "json" && format != "csv" && format != "svg") throw py::value_error("format: json, csv or svg");
        py::gil_scoped_release release;
        const Comparison c = compare_models(models, o);
        if (format == "csv") return format_comparison_csv(c);
        if (format == "svg") return format_comparison_svg(c);
        return format_comparison_json(c);
      },
      py::arg("models"), py::arg("format") = "json", py::arg("dtype") = "fp32", py::arg("fusion") = true,
      py::arg("per_consumer_reads") = false, py::arg("input_shape") = py::none(), py::arg("profile") = py::none(),
      py::arg("overlap") = true, py::arg("cache_dir") = py::none());

  m.def(
      "fetch",
      [](const std::string& name, std::optional<std::string> cache_dir) {
        py::gil_scoped_release release;
        return fetch_model(name, cache_dir ? std::filesystem::path(*cache_dir) : default_cache_dir());
      },
      py::arg("name"), py::arg("cache_dir") = py::none());

  m.def("registry", [] {
    std::vector<std::string> names;
    for (const ZooEntry& e : builtin_registry()) names.push_back(e.name);
    return names;
  });

  m.def("profiles", [] {
    py::list out;
    for (const HardwareProfile& p : builtin_profiles()) {
      py::dict d;
      d["name"] = p.name;
      d["peak_gflops"] = p.peak_compute / 1e9;
      d["bandwidth_gbps"] = p.mem_bandwidth / 1e9;
      d["note"] = p.note;
      out.append(d);
    }
    return out;
  });

  m.def(
      "classify",
      [](int64_t flops, int64_t bytes, const std::string& profile, bool overlap) {
        const Classification c = classify(flops, bytes, load_profile(profile), overlap);
        py::dict d;
        d["bound"] = std::string(to_string(c.bound));
        d["compute_time"] = c.compute_time;
        d["transfer_time"] = c.transfer_time;
        d["latency_floor"] = c.latency_floor;
        return d;
      },
      py::arg("flops"), py::arg("bytes"), py::arg("profile"), py::arg("overlap") = true);

  m.def("arithmetic_intensity", &arithmetic_intensity, py::arg("flops"), py::arg("bytes"));
}
