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

#include "edgecost/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "edgecost/errors.hpp"
#include "edgecost/fusion.hpp"
#include "edgecost/model_io.hpp"
#include "edgecost/zoo.hpp"

namespace edgecost {

using Json = nlohmann::ordered_json;

std::string format_float(double value) {
  if (!std::isfinite(value)) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

double round6(double value) { return std::stod(format_float(value)); }

std::string printf_string(const char* fmt, auto... args) {
  const int n = std::snprintf(nullptr, 0, fmt, args...);
  std::string out(static_cast<size_t>(n), '\0');
  std::snprintf(out.data(), out.size() + 1, fmt, args...);
  return out;
}

bool is_registry_name(const std::string& spec) {
  const auto registry = builtin_registry();
  return std::any_of(registry.begin(), registry.end(), [&](const ZooEntry& e) { return e.name == spec; });
}

bool looks_like_path(const std::string& spec) {
  return spec.find('/') != std::string::npos || std::filesystem::path(spec).has_extension();
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double mega(int64_t v) { return static_cast<double>(v) / 1e6; }
double giga(int64_t v) { return static_cast<double>(v) / 1e9; }

Json profile_json(const AnalysisOptions& options) {
  if (!options.profile) return nullptr;
  const HardwareProfile& p = *options.profile;
  Json j;
  j["name"] = p.name;
  j["peak_gflops"] = round6(p.peak_compute / 1e9);
  j["bandwidth_gbps"] = round6(p.mem_bandwidth / 1e9);
  j["ridge_intensity"] = round6(p.ridge_intensity());
  j["overlap"] = options.overlap;
  return j;
}

Json options_json(const AnalysisOptions& options) {
  Json j;
  j["dtype"] = std::string(options.dtype.name());
  j["fusion"] = options.fusion;
  j["per_consumer_reads"] = options.per_consumer_reads;
  j["input_shape"] = options.input_shape ? Json(*options.input_shape) : Json(nullptr);
  return j;
}

Json row_json(const ModelSummaryRow& row) {
  Json j;
  j["model"] = row.model;
  j["macs"] = row.macs;
  j["flops_pre"] = row.flops_pre;
  j["flops_post"] = row.flops_post;
  j["params"] = row.params;
  j["param_bytes"] = row.param_bytes;
  j["bw_pre_bytes"] = row.bw_pre_bytes;
  j["bw_post_bytes"] = row.bw_post_bytes;
  j["weight_bytes"] = row.weight_bytes;
  j["activation_bytes"] = row.activation_bytes;
  j["intensity"] = row.intensity;
  j["bound"] = row.bound ? Json(std::string(to_string(*row.bound))) : Json(nullptr);
  return j;
}

ModelSummaryRow row_from(const Json& j) {
  ModelSummaryRow row;
  row.model = j.at("model").get<std::string>();
  row.macs = j.at("macs").get<int64_t>();
  row.flops_pre = j.at("flops_pre").get<int64_t>();
  row.flops_post = j.at("flops_post").get<int64_t>();
  row.params = j.at("params").get<int64_t>();
  row.param_bytes = j.at("param_bytes").get<int64_t>();
  row.bw_pre_bytes = j.at("bw_pre_bytes").get<int64_t>();
  row.bw_post_bytes = j.at("bw_post_bytes").get<int64_t>();
  row.weight_bytes = j.at("weight_bytes").get<int64_t>();
  row.activation_bytes = j.at("activation_bytes").get<int64_t>();
  row.intensity = j.at("intensity").get<double>();
  const Json& bound = j.at("bound");
  if (!bound.is_null()) row.bound = bound.get<std::string>() == "compute" ? Bound::kCompute : Bound::kBandwidth;
  return row;
}

}  // namespace

std::string model_display_name(const std::string& spec) {
  if (!std::filesystem::exists(spec) && is_registry_name(spec)) return spec;
  return std::filesystem::path(spec).stem().string();
}

std::filesystem::path resolve_model(const std::string& spec, const std::filesystem::path& cache_dir) {
  if (std::filesystem::is_regular_file(spec)) return spec;
  if (is_registry_name(spec)) return fetch_model(spec, cache_dir.empty() ? default_cache_dir() : cache_dir);
  if (looks_like_path(spec)) throw FileNotFound("file not found: " + spec);
  throw UnknownModel("'" + spec + "' is neither a file nor a registry model");
}

ModelAnalysis analyze_raw(const RawModel& raw, const std::string& name, const AnalysisOptions& options) {
  ModelAnalysis a;
  a.model = name;
  a.options = options;
  const int64_t batch = options.input_shape && !options.input_shape->empty() ? options.input_shape->front() : 1;
  a.unfused = infer_shapes(build_ir(raw, batch, options.dtype), options.input_shape);
  a.analyzed = options.fusion ? apply_fusion(a.unfused) : a.unfused;

  const TrafficOptions traffic_options{options.per_consumer_reads};
  a.cost_pre = model_cost(a.unfused);
  a.cost_post = model_cost(a.analyzed);
  a.traffic_pre = model_traffic(a.unfused, options.dtype, traffic_options);
  a.traffic_post = model_traffic(a.analyzed, options.dtype, traffic_options);

  for (const Node& node : a.analyzed.nodes) {
    LayerRow row;
    row.name = node.name;
    row.op_type = node.op_type;
    const std::string& out = node.outputs.front();
    if (!out.empty()) row.output_shape = format_shape(a.analyzed.tensor(out).shape);
    const NodeCost& cost = a.cost_post.nodes[node.id];
    row.macs = cost.macs;
    row.flops = cost.flops;
    row.param_bytes = cost.param_bytes;
    row.traffic_bytes = a.traffic_post.node_bytes[node.id];
    if (node.is_absorbed()) row.fused_into = a.analyzed.nodes[node.fusion.anchor].name;
    a.layers.push_back(std::move(row));
  }

  ModelSummaryRow& s = a.summary;
  s.model = name;
  s.macs = a.cost_pre.totals.macs;
  s.flops_pre = a.cost_pre.totals.flops;
  s.flops_post = a.cost_post.totals.flops;
  s.params = a.cost_pre.totals.params;
  s.param_bytes = a.cost_pre.totals.param_bytes;
  s.bw_pre_bytes = a.traffic_pre.grand_total;
  s.bw_post_bytes = a.traffic_post.grand_total;
  s.weight_bytes = a.traffic_post.weight_bytes;
  s.activation_bytes = a.traffic_post.activation_bytes;
  s.intensity = round6(arithmetic_intensity(s.flops_post, s.bw_post_bytes));
  if (options.profile) {
    a.roofline = classify(s.flops_post, s.bw_post_bytes, *options.profile, options.overlap);
    s.bound = a.roofline->bound;
  }
  return a;
}

ModelAnalysis analyze_model(const std::string& spec, const AnalysisOptions& options) {
  const std::filesystem::path path = resolve_model(spec, options.cache_dir);
  ModelAnalysis a = analyze_raw(load_model(path), model_display_name(spec), options);
  a.source = path;
  return a;
}

std::string format_layers_text(const ModelAnalysis& a) {
  std::string out;
  out += printf_string("%-36s %-20s %-18s %14s %14s %12s %14s  %s\n", "layer", "op", "output", "MACs", "FLOPs",
                       "param bytes", "traffic bytes", "fused");
  for (const LayerRow& r : a.layers) {
    out += printf_string("%-36s %-20s %-18s %14lld %14lld %12lld %14lld  %s\n", r.name.c_str(), r.op_type.c_str(),
                         r.output_shape.c_str(), static_cast<long long>(r.macs), static_cast<long long>(r.flops),
                         static_cast<long long>(r.param_bytes), static_cast<long long>(r.traffic_bytes),
                         r.fused_into.empty() ? "-" : ("-> " + r.fused_into).c_str());
  }
  const ModelSummaryRow& s = a.summary;
  out += "\n";
  out += printf_string("model              %s (%s, fusion %s)\n", s.model.c_str(), std::string(a.options.dtype.name()).c_str(),
                       a.options.fusion ? "on" : "off");
  out += printf_string("MACs               %.3f G\n", giga(s.macs));
  out += printf_string("FLOPs              %.3f G (%.3f G before fusion)\n", giga(s.flops_post), giga(s.flops_pre));
  out += printf_string("parameters         %.3f M (%.2f MB)\n", mega(s.params), mega(s.param_bytes));
  out += printf_string("traffic            %.2f MB (%.2f MB before fusion)\n", mega(s.bw_post_bytes), mega(s.bw_pre_bytes));
  out += printf_string("  weights          %.2f MB\n", mega(s.weight_bytes));
  out += printf_string("  activations      %.2f MB\n", mega(s.activation_bytes));
  out += printf_string("intensity          %s FLOP/byte\n", format_float(s.intensity).c_str());
  if (a.roofline) {
    const HardwareProfile& p = *a.options.profile;
    out += printf_string("profile            %s (ridge %s FLOP/byte)\n", p.name.c_str(),
                         format_float(p.ridge_intensity()).c_str());
    out += printf_string("bound              %s\n", std::string(to_string(a.roofline->bound)).c_str());
    out += printf_string("latency floor      %s ms (compute %s ms, transfer %s ms)\n",
                         format_float(a.roofline->latency_floor * 1e3).c_str(),
                         format_float(a.roofline->compute_time * 1e3).c_str(),
                         format_float(a.roofline->transfer_time * 1e3).c_str());
  }
  return out;
}

std::string format_layers_csv(const ModelAnalysis& a) {
  std::string out = "layer,op,output_shape,macs,flops,param_bytes,traffic_bytes,fused_into\n";
  for (const LayerRow& r : a.layers) {
    out += csv_field(r.name) + "," + r.op_type + "," + r.output_shape + "," + std::to_string(r.macs) + "," +
           std::to_string(r.flops) + "," + std::to_string(r.param_bytes) + "," + std::to_string(r.traffic_bytes) + "," +
           csv_field(r.fused_into) + "\n";
  }
  const CostTotals& t = a.cost_post.totals;
  out += "TOTAL,,," + std::to_string(t.macs) + "," + std::to_string(t.flops) + "," + std::to_string(t.param_bytes) +
         "," + std::to_string(a.traffic_post.grand_total) + ",\n";
  return out;
}

std::string format_analysis_json(const ModelAnalysis& a) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = a.model;
  j["options"] = options_json(a.options);
  Json totals = row_json(a.summary);
  totals.erase("model");
  totals.erase("bound");
  totals["unattributed_bytes"] = a.traffic_post.unattributed_bytes;
  j["totals"] = totals;
  if (a.roofline) {
    Json r;
    r["profile"] = profile_json(a.options);
    r["bound"] = std::string(to_string(a.roofline->bound));
    r["compute_time_s"] = round6(a.roofline->compute_time);
    r["transfer_time_s"] = round6(a.roofline->transfer_time);
    r["latency_floor_s"] = round6(a.roofline->latency_floor);
    j["roofline"] = r;
  } else {
    j["roofline"] = nullptr;
  }
  Json layers = Json::array();
  for (const LayerRow& r : a.layers) {
    Json l;
    l["name"] = r.name;
    l["op"] = r.op_type;
    l["output_shape"] = r.output_shape;
    l["macs"] = r.macs;
    l["flops"] = r.flops;
    l["param_bytes"] = r.param_bytes;
    l["traffic_bytes"] = r.traffic_bytes;
    l["fused_into"] = r.fused_into.empty() ? Json(nullptr) : Json(r.fused_into);
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j.dump(2) + "\n";
}

Comparison compare_models(const std::vector<std::string>& specs, const AnalysisOptions& options, unsigned jobs) {
  struct Slot {
    std::optional<ModelSummaryRow> row;
    std::string error;
  };
  std::vector<Slot> slots(specs.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < specs.size(); i = next++) {
      try {
        slots[i].row = analyze_model(specs[i], options).summary;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<size_t>(specs.size(), 1)));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  Comparison c;
  c.options = options;
  for (size_t i = 0; i < specs.size(); ++i) {
    if (slots[i].row) {
      c.rows.push_back(std::move(*slots[i].row));
    } else {
      c.errors.push_back({model_display_name(specs[i]), slots[i].error});
    }
  }
  return c;
}

std::string format_comparison_text(const Comparison& c) {
  std::string out = printf_string("%-18s %10s %10s %10s %12s %12s %10s  %s\n", "model", "GFLOPs", "M params",
                                  "param MB", "traffic MB", "pre-fuse MB", "FLOP/B", "bound");
  for (const ModelSummaryRow& r : c.rows) {
    out += printf_string("%-18s %10.3f %10.3f %10.2f %12.2f %12.2f %10s  %s\n", r.model.c_str(), giga(r.flops_post),
                         mega(r.params), mega(r.param_bytes), mega(r.bw_post_bytes), mega(r.bw_pre_bytes),
                         format_float(r.intensity).c_str(), r.bound ? std::string(to_string(*r.bound)).c_str() : "-");
  }
  for (const ComparisonError& e : c.errors) out += "error: " + e.model + ": " + e.message + "\n";
  return out;
}

std::string format_comparison_csv(const Comparison& c) {
  std::string out = std::string(kComparisonCsvHeader) + "\n";
  for (const ModelSummaryRow& r : c.rows) {
    out += csv_field(r.model) + "," + std::to_string(r.macs) + "," + std::to_string(r.flops_pre) + "," +
           std::to_string(r.flops_post) + "," + std::to_string(r.params) + "," + std::to_string(r.param_bytes) + "," +
           std::to_string(r.bw_pre_bytes) + "," + std::to_string(r.bw_post_bytes) + "," +
           std::to_string(r.weight_bytes) + "," + std::to_string(r.activation_bytes) + "," +
           format_float(r.intensity) + "," + (r.bound ? std::string(to_string(*r.bound)) : std::string()) + "\n";
  }
  return out;
}

std::string format_comparison_json(const Comparison& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["options"] = options_json(c.options);
  j["profile"] = profile_json(c.options);
  Json rows = Json::array();
  for (const ModelSummaryRow& r : c.rows) rows.push_back(row_json(r));
  j["models"] = std::move(rows);
  Json errors = Json::array();
  for (const ComparisonError& e : c.errors) errors.push_back({{"model", e.model}, {"message", e.message}});
  j["errors"] = std::move(errors);
  return j.dump(2) + "\n";
}

std::vector<ModelSummaryRow> rows_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  std::vector<ModelSummaryRow> rows;
  for (const Json& r : j.at("models")) rows.push_back(row_from(r));
  return rows;
}

std::string format_comparison_svg(const Comparison& c) {
  constexpr double kWidth = 760, kHeight = 520;
  constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const auto lg = [](int64_t v) { return std::log10(static_cast<double>(std::max<int64_t>(v, 1))); };
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!c.rows.empty()) {
    x_lo = y_lo = 1e300;
    x_hi = y_hi = -1e300;
    for (const ModelSummaryRow& r : c.rows) {
      x_lo = std::min(x_lo, lg(r.flops_post));
      x_hi = std::max(x_hi, lg(r.flops_post));
      y_lo = std::min(y_lo, lg(r.bw_post_bytes));
      y_hi = std::max(y_hi, lg(r.bw_post_bytes));
    }
    x_lo = std::floor(x_lo);
    y_lo = std::floor(y_lo);
    x_hi = std::max(std::ceil(x_hi), x_lo + 1);
    y_hi = std::max(std::ceil(y_hi), y_lo + 1);
  }
  const auto px = [&](double lx) { return kLeft + (lx - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double ly) { return kTop + plot_h - (ly - y_lo) / (y_hi - y_lo) * plot_h; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << printf_string("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\" "
                     "font-family=\"sans-serif\" font-size=\"12\">\n",
                     kWidth, kHeight, kWidth, kHeight);
  s << printf_string("<rect x=\"0\" y=\"0\" width=\"%g\" height=\"%g\" fill=\"white\"/>\n", kWidth, kHeight);
  s << printf_string("<text x=\"%g\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">FLOPs vs memory traffic per "
                     "inference (%s)</text>\n",
                     kWidth / 2, std::string(c.options.dtype.name()).c_str());
  s << printf_string("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, plot_w, plot_h);
  for (int d = static_cast<int>(x_lo); d <= static_cast<int>(x_hi); ++d) {
    const double x = px(d);
    s << printf_string("<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"#ddd\"/>\n", x, kTop, x,
                       kTop + plot_h);
    s << printf_string("<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">1e%d</text>\n", x, kTop + plot_h + 18, d);
  }
  for (int d = static_cast<int>(y_lo); d <= static_cast<int>(y_hi); ++d) {
    const double y = py(d);
    s << printf_string("<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", kLeft, y,
                       kLeft + plot_w, y);
    s << printf_string("<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">1e%d</text>\n", kLeft - 6, y + 4, d);
  }
  s << printf_string("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">FLOPs per inference (log)</text>\n",
                     kLeft + plot_w / 2, kHeight - 25);
  s << printf_string("<text x=\"20\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 20 %g)\">bytes moved per "
                     "inference (log)</text>\n",
                     kTop + plot_h / 2, kTop + plot_h / 2);
  for (const ModelSummaryRow& r : c.rows) {
    const double x = px(lg(r.flops_post));
    const double y = py(lg(r.bw_post_bytes));
    const std::string name = xml_escape(r.model);
    s << printf_string("<g class=\"point\"><circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"#1f77b4\"><title>%s: %lld "
                       "FLOPs, %lld bytes</title></circle>",
                       x, y, name.c_str(), static_cast<long long>(r.flops_post),
                       static_cast<long long>(r.bw_post_bytes));
    s << printf_string("<text x=\"%.2f\" y=\"%.2f\">%s</text></g>\n", x + 7, y - 7, name.c_str());
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace edgecost
