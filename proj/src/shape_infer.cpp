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

#include "edgecost/shape_infer.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>

#include "edgecost/errors.hpp"

namespace edgecost {

namespace {

[[noreturn]] void fail(std::string_view op, const std::string& what) {
  throw RuleFailure(std::string(op) + ": " + what);
}

int64_t product(const Shape& s, size_t begin = 0, size_t end = SIZE_MAX) {
  end = std::min(end, s.size());
  int64_t p = 1;
  for (size_t i = begin; i < end; ++i) p *= s[i];
  return p;
}

int64_t normalize_axis(std::string_view op, int64_t axis, size_t rank) {
  const auto r = static_cast<int64_t>(rank);
  if (axis < -r || axis >= r) {
    fail(op, "axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
  }
  return axis < 0 ? axis + r : axis;
}

const ShapeOperand& need(std::string_view op, std::span<const ShapeOperand> inputs, size_t i) {
  if (i >= inputs.size() || !inputs[i].present) {
    fail(op, "missing required input " + std::to_string(i));
  }
  return inputs[i];
}

// Multidirectional (numpy) broadcasting.
Shape broadcast(std::string_view op, const Shape& a, const Shape& b) {
  const size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (size_t i = 0; i < rank; ++i) {
    const int64_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const int64_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      fail(op, "cannot broadcast " + format_shape(a) + " with " + format_shape(b));
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

// Element of `values` (laid out with shape `s`) addressed by a multi-index
// into the broadcast shape `out`.
int64_t broadcast_value(const std::vector<int64_t>& values, const Shape& s, const Shape& out, int64_t flat) {
  int64_t offset = 0;
  int64_t stride = 1;
  for (size_t k = out.size(); k-- > 0;) {
    const int64_t coord = flat % out[k];
    flat /= out[k];
    const size_t j = k + s.size();
    if (j >= out.size()) {
      const int64_t dim = s[j - out.size()];
      offset += (dim == 1 ? 0 : coord) * stride;
      stride *= dim;
    }
  }
  return values[static_cast<size_t>(offset)];
}

std::optional<std::vector<int64_t>> fold_binary(std::string_view op, const ShapeOperand& a, const ShapeOperand& b,
                                                const Shape& out) {
  if (!a.values || !b.values) return std::nullopt;
  const int64_t n = product(out);
  if (n > kMaxRetainedIntElements) return std::nullopt;
  std::vector<int64_t> result(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const int64_t x = broadcast_value(*a.values, a.shape, out, i);
    const int64_t y = broadcast_value(*b.values, b.shape, out, i);
    if (op == "Add") result[i] = x + y;
    else if (op == "Sub") result[i] = x - y;
    else if (op == "Mul") result[i] = x * y;
    else {
      if (y == 0) return std::nullopt;
      // Integer Div truncates toward zero in ONNX.
      result[i] = x / y;
    }
  }
  return result;
}

// Integer list from an input tensor (opset >= N form) or an attribute.
std::optional<std::vector<int64_t>> ints_from(std::span<const ShapeOperand> inputs, size_t slot,
                                              const Attributes& attrs, const std::string& attr_name,
                                              std::string_view op) {
  if (slot < inputs.size() && inputs[slot].present) {
    if (!inputs[slot].values) fail(op, "input " + std::to_string(slot) + " is not statically known");
    return inputs[slot].values;
  }
  return attrs.get_ints(attr_name);
}

struct WindowParams {
  std::vector<int64_t> kernel, strides, dilations, pads;
  std::string auto_pad;
  bool ceil_mode = false;
};

Shape window_output(std::string_view op, const Shape& x, const WindowParams& p) {
  const size_t spatial = x.size() - 2;
  Shape out(spatial);
  for (size_t i = 0; i < spatial; ++i) {
    const int64_t in = x[i + 2];
    const int64_t k = p.kernel[i];
    const int64_t s = p.strides[i];
    const int64_t d = p.dilations[i];
    const int64_t effective = d * (k - 1) + 1;
    if (p.auto_pad == "SAME_UPPER" || p.auto_pad == "SAME_LOWER") {
      out[i] = (in + s - 1) / s;
      continue;
    }
    const int64_t begin = p.auto_pad == "VALID" ? 0 : p.pads[i];
    const int64_t end = p.auto_pad == "VALID" ? 0 : p.pads[i + spatial];
    const int64_t padded = in + begin + end;
    if (padded < effective) {
      fail(op, "kernel " + std::to_string(effective) + " larger than padded input " + std::to_string(padded));
    }
    int64_t n = p.ceil_mode ? (padded - effective + s - 1) / s + 1 : (padded - effective) / s + 1;
    // The last window must start inside the input or left padding.
    if (p.ceil_mode && (n - 1) * s >= in + begin) --n;
    out[i] = n;
  }
  return out;
}

WindowParams window_params(std::string_view op, const Attributes& attrs, size_t spatial,
                           const std::vector<int64_t>& kernel) {
  WindowParams p;
  p.kernel = kernel;
  if (p.kernel.size() != spatial) {
    fail(op, "kernel rank " + std::to_string(p.kernel.size()) + " does not match " + std::to_string(spatial) +
                 " spatial dims");
  }
  p.strides = attrs.get_ints("strides").value_or(std::vector<int64_t>(spatial, 1));
  p.dilations = attrs.get_ints("dilations").value_or(std::vector<int64_t>(spatial, 1));
  p.pads = attrs.get_ints("pads").value_or(std::vector<int64_t>(2 * spatial, 0));
  p.auto_pad = attrs.get_string("auto_pad", "NOTSET");
  p.ceil_mode = attrs.get_int("ceil_mode", 0) != 0;
  if (p.strides.size() != spatial || p.dilations.size() != spatial || p.pads.size() != 2 * spatial) {
    fail(op, "strides/dilations/pads rank mismatch");
  }
  return p;
}

std::vector<ShapeResult> same_as_input(std::span<const ShapeOperand> inputs, std::string_view op,
                                       bool keep_values) {
  const ShapeOperand& x = need(op, inputs, 0);
  return {ShapeResult{x.shape, keep_values ? x.values : std::nullopt}};
}

std::vector<ShapeResult> infer_conv(std::span<const ShapeOperand> inputs, const Attributes& attrs) {
  const Shape& x = need("Conv", inputs, 0).shape;
  const Shape& w = need("Conv", inputs, 1).shape;
  if (x.size() < 3 || w.size() != x.size()) {
    fail("Conv", "input " + format_shape(x) + " and weight " + format_shape(w) + " ranks disagree");
  }
  const int64_t group = attrs.get_int("group", 1);
  if (w[1] * group != x[1]) {
    fail("Conv", "weight " + format_shape(w) + " with group " + std::to_string(group) + " expects " +
                     std::to_string(w[1] * group) + " input channels, got " + std::to_string(x[1]));
  }
  if (w[0] % group != 0) {
    fail("Conv", "group " + std::to_string(group) + " does not divide " + std::to_string(w[0]) + " output channels");
  }
  if (inputs.size() > 2 && inputs[2].present && product(inputs[2].shape) != w[0]) {
    fail("Conv", "bias length does not match output channels");
  }
  const std::vector<int64_t> kernel = attrs.get_ints("kernel_shape").value_or(Shape(w.begin() + 2, w.end()));
  if (!std::equal(kernel.begin(), kernel.end(), w.begin() + 2, w.end())) {
    fail("Conv", "kernel_shape disagrees with weight " + format_shape(w));
  }
  const WindowParams p = window_params("Conv", attrs, x.size() - 2, kernel);
  Shape out = {x[0], w[0]};
  const Shape spatial = window_output("Conv", x, p);
  out.insert(out.end(), spatial.begin(), spatial.end());
  return {ShapeResult{out, std::nullopt}};
}

std::vector<ShapeResult> infer_pool(std::string_view op, std::span<const ShapeOperand> inputs,
                                    const Attributes& attrs, size_t num_outputs) {
  const Shape& x = need(op, inputs, 0).shape;
  if (x.size() < 3) fail(op, "input rank must be >= 3");
  const auto kernel = attrs.get_ints("kernel_shape");
  if (!kernel) fail(op, "kernel_shape is required");
  const WindowParams p = window_params(op, attrs, x.size() - 2, *kernel);
  Shape out = {x[0], x[1]};
  const Shape spatial = window_output(op, x, p);
  out.insert(out.end(), spatial.begin(), spatial.end());
  std::vector<ShapeResult> results(num_outputs, ShapeResult{out, std::nullopt});
  return results;
}

std::vector<ShapeResult> infer_gemm(std::span<const ShapeOperand> inputs, const Attributes& attrs) {
  const Shape& a = need("Gemm", inputs, 0).shape;
  const Shape& b = need("Gemm", inputs, 1).shape;
  if (a.size() != 2 || b.size() != 2) fail("Gemm", "operands must be 2-D");
  const bool ta = attrs.get_int("transA", 0) != 0;
  const bool tb = attrs.get_int("transB", 0) != 0;
  const int64_t m = ta ? a[1] : a[0];
  const int64_t ka = ta ? a[0] : a[1];
  const int64_t kb = tb ? b[1] : b[0];
  const int64_t n = tb ? b[0] : b[1];
  if (ka != kb) {
    fail("Gemm", "inner dims disagree: " + format_shape(a) + " x " + format_shape(b));
  }
  if (inputs.size() > 2 && inputs[2].present) {
    broadcast("Gemm", inputs[2].shape, Shape{m, n});
  }
  return {ShapeResult{Shape{m, n}, std::nullopt}};
}

std::vector<ShapeResult> infer_matmul(std::span<const ShapeOperand> inputs) {
  Shape a = need("MatMul", inputs, 0).shape;
  Shape b = need("MatMul", inputs, 1).shape;
  if (a.empty() || b.empty()) fail("MatMul", "scalar operands are not allowed");
  const bool a_vec = a.size() == 1;
  const bool b_vec = b.size() == 1;
  if (a_vec) a.insert(a.begin(), 1);
  if (b_vec) b.push_back(1);
  if (a.back() != b[b.size() - 2]) {
    fail("MatMul", "inner dims disagree: " + format_shape(a) + " x " + format_shape(b));
  }
  Shape batch = broadcast("MatMul", Shape(a.begin(), a.end() - 2), Shape(b.begin(), b.end() - 2));
  if (!a_vec) batch.push_back(a[a.size() - 2]);
  if (!b_vec) batch.push_back(b.back());
  return {ShapeResult{batch, std::nullopt}};
}

std::vector<ShapeResult> infer_concat(std::span<const ShapeOperand> inputs, const Attributes& attrs) {
  std::vector<const ShapeOperand*> present;
  for (const auto& in : inputs) {
    if (in.present) present.push_back(&in);
  }
  if (present.empty()) fail("Concat", "no inputs");
  Shape out = present.front()->shape;
  const int64_t axis = normalize_axis("Concat", attrs.get_int("axis", 0), out.size());
  out[axis] = 0;
  bool all_values = true;
  std::vector<int64_t> values;
  for (const ShapeOperand* in : present) {
    if (in->shape.size() != out.size()) fail("Concat", "rank mismatch");
    for (size_t d = 0; d < out.size(); ++d) {
      if (static_cast<int64_t>(d) != axis && in->shape[d] != out[d]) {
        fail("Concat", "non-axis dims differ: " + format_shape(present.front()->shape) + " vs " +
                           format_shape(in->shape));
      }
    }
    out[axis] += in->shape[axis];
    if (in->values) {
      values.insert(values.end(), in->values->begin(), in->values->end());
    } else {
      all_values = false;
    }
  }
  ShapeResult r{out, std::nullopt};
  if (all_values && out.size() == 1) r.values = std::move(values);
  return {r};
}

std::vector<ShapeResult> infer_reshape(std::span<const ShapeOperand> inputs, const Attributes& attrs) {
  const ShapeOperand& x = need("Reshape", inputs, 0);
  const auto target = ints_from(inputs, 1, attrs, "shape", "Reshape");
  if (!target) fail("Reshape", "target shape is not statically known");
  const bool allow_zero = attrs.get_int("allowzero", 0) != 0;
  Shape out(target->size());
  int infer_at = -1;
  int64_t known = 1;
  for (size_t i = 0; i < target->size(); ++i) {
    int64_t d = (*target)[i];
    if (d == 0 && !allow_zero) {
      if (i >= x.shape.size()) fail("Reshape", "0 refers past input rank");
      d = x.shape[i];
    }
    if (d == -1) {
      if (infer_at >= 0) fail("Reshape", "more than one -1 in target");
      infer_at = static_cast<int>(i);
      continue;
    }
    if (d < 0) fail("Reshape", "negative target dim");
    out[i] = d;
    known *= d;
  }
  const int64_t total = product(x.shape);
  if (infer_at >= 0) {
    if (known == 0 || total % known != 0) fail("Reshape", "cannot infer -1 for " + format_shape(x.shape));
    out[infer_at] = total / known;
  } else if (known != total) {
    fail("Reshape", "element count changes from " + format_shape(x.shape) + " to " + format_shape(out));
  }
  return {ShapeResult{out, x.values}};
}

std::vector<ShapeResult> infer_slice(std::span<const ShapeOperand> inputs, const Attributes& attrs, int64_t opset) {
  const ShapeOperand& x = need("Slice", inputs, 0);
  std::optional<std::vector<int64_t>> starts, ends, axes, steps;
  if (opset >= 10) {
    starts = ints_from(inputs, 1, attrs, "starts", "Slice");
    ends = ints_from(inputs, 2, attrs, "ends", "Slice");
    axes = ints_from(inputs, 3, attrs, "axes", "Slice");
    steps = ints_from(inputs, 4, attrs, "steps", "Slice");
  } else {
    starts = attrs.get_ints("starts");
    ends = attrs.get_ints("ends");
    axes = attrs.get_ints("axes");
  }
  if (!starts || !ends || starts->size() != ends->size()) fail("Slice", "starts/ends missing or mismatched");
  if (!axes) {
    axes = std::vector<int64_t>(starts->size());
    std::iota(axes->begin(), axes->end(), 0);
  }
  if (!steps) steps = std::vector<int64_t>(starts->size(), 1);
  Shape out = x.shape;
  std::vector<std::array<int64_t, 3>> ranges(out.size());
  for (size_t d = 0; d < out.size(); ++d) ranges[d] = {0, out[d], 1};
  for (size_t i = 0; i < starts->size(); ++i) {
    const int64_t axis = normalize_axis("Slice", (*axes)[i], out.size());
    const int64_t dim = x.shape[axis];
    const int64_t step = (*steps)[i];
    if (step == 0) fail("Slice", "step must be non-zero");
    int64_t start = (*starts)[i];
    int64_t end = (*ends)[i];
    if (start < 0) start += dim;
    if (end < 0) end += dim;
    int64_t len;
    if (step > 0) {
      start = std::clamp<int64_t>(start, 0, dim);
      end = std::clamp<int64_t>(end, 0, dim);
      len = end > start ? (end - start + step - 1) / step : 0;
    } else {
      start = std::clamp<int64_t>(start, 0, dim - 1);
      end = std::clamp<int64_t>(end, -1, dim - 1);
      len = start > end ? (start - end - step - 1) / -step : 0;
    }
    out[axis] = len;
    ranges[axis] = {start, end, step};
  }
  ShapeResult r{out, std::nullopt};
  if (x.values && x.shape.size() == 1) {
    std::vector<int64_t> v;
    const auto [start, end, step] = ranges[0];
    for (int64_t i = start; step > 0 ? i < end : i > end; i += step) v.push_back((*x.values)[i]);
    r.values = std::move(v);
  }
  return {r};
}

std::vector<ShapeResult> infer_gather(std::span<const ShapeOperand> inputs, const Attributes& attrs) {
  const ShapeOperand& data = need("Gather", inputs, 0);
  const ShapeOperand& indices = need("Gather", inputs, 1);
  if (data.shape.empty()) fail("Gather", "data must have rank >= 1");
  const int64_t axis = normalize_axis("Gather", attrs.get_int("axis", 0), data.shape.size());
  Shape out(data.shape.begin(), data.shape.begin() + axis);
  out.insert(out.end(), indices.shape.begin(), indices.shape.end());
  out.insert(out.end(), data.shape.begin() + axis + 1, data.shape.end());
  ShapeResult r{out, std::nullopt};
  if (data.values && indices.values && data.shape.size() == 1) {
    std::vector<int64_t> v;
    const int64_t dim = data.shape[0];
    for (int64_t idx : *indices.values) {
      if (idx < -dim || idx >= dim) fail("Gather", "index out of range");
      v.push_back((*data.values)[idx < 0 ? idx + dim : idx]);
    }
    r.values = std::move(v);
  }
  return {r};
}

std::vector<ShapeResult> infer_split(std::span<const ShapeOperand> inputs, const Attributes& attrs,
                                     size_t num_outputs) {
  const Shape& x = need("Split", inputs, 0).shape;
  const int64_t axis = normalize_axis("Split", attrs.get_int("axis", 0), x.size());
  std::vector<int64_t> sizes;
  if (auto split = ints_from(inputs, 1, attrs, "split", "Split")) {
    sizes = *split;
  } else {
    const auto n = static_cast<int64_t>(attrs.get_int("num_outputs", static_cast<int64_t>(num_outputs)));
    if (n <= 0) fail("Split", "no outputs");
    const int64_t chunk = (x[axis] + n - 1) / n;
    for (int64_t i = 0; i < n; ++i) sizes.push_back(std::min(chunk, x[axis] - i * chunk));
  }
  if (sizes.size() != num_outputs) fail("Split", "split count disagrees with output count");
  if (std::accumulate(sizes.begin(), sizes.end(), int64_t{0}) != x[axis]) {
    fail("Split", "split sizes do not sum to axis length");
  }
  std::vector<ShapeResult> out;
  for (int64_t s : sizes) {
    Shape o = x;
    o[axis] = s;
    out.push_back({o, std::nullopt});
  }
  return out;
}

}  // namespace

std::vector<ShapeResult> infer_node(std::string_view op, std::span<const ShapeOperand> inputs,
                                    const Attributes& attrs, size_t num_outputs, int64_t opset) {
  if (op == "Conv") return infer_conv(inputs, attrs);
  if (op == "MaxPool" || op == "AveragePool") return infer_pool(op, inputs, attrs, num_outputs);
  if (op == "GlobalAveragePool") {
    Shape out = need(op, inputs, 0).shape;
    if (out.size() < 3) fail(op, "input rank must be >= 3");
    std::fill(out.begin() + 2, out.end(), 1);
    return {ShapeResult{out, std::nullopt}};
  }
  if (op == "Gemm") return infer_gemm(inputs, attrs);
  if (op == "MatMul") return infer_matmul(inputs);
  if (op == "BatchNormalization") {
    const Shape& x = need(op, inputs, 0).shape;
    if (x.size() < 2) fail(op, "input rank must be >= 2");
    for (size_t i = 1; i < 5; ++i) {
      if (product(need(op, inputs, i).shape) != x[1]) fail(op, "parameter " + std::to_string(i) + " length != C");
    }
    std::vector<ShapeResult> out = {ShapeResult{x, std::nullopt}};
    for (size_t i = 1; i < num_outputs; ++i) out.push_back({Shape{x[1]}, std::nullopt});
    return out;
  }
  if (op == "Relu" || op == "LeakyRelu" || op == "Sigmoid" || op == "HardSigmoid" || op == "Softmax" ||
      op == "LRN" || op == "Clip") {
    return same_as_input(inputs, op, false);
  }
  if (op == "Identity" || op == "Cast") return same_as_input(inputs, op, true);
  if (op == "Dropout") {
    std::vector<ShapeResult> out = same_as_input(inputs, op, true);
    if (num_outputs > 1) out.push_back({out.front().shape, std::nullopt});
    return out;
  }
  if (op == "PRelu") {
    const Shape& x = need(op, inputs, 0).shape;
    const Shape out = broadcast(op, x, need(op, inputs, 1).shape);
    if (out != x) fail(op, "slope must broadcast to the input shape");
    return {ShapeResult{out, std::nullopt}};
  }
  if (op == "Add" || op == "Mul" || op == "Sub" || op == "Div") {
    const ShapeOperand& a = need(op, inputs, 0);
    const ShapeOperand& b = need(op, inputs, 1);
    Shape out = broadcast(op, a.shape, b.shape);
    auto values = fold_binary(op, a, b, out);
    return {ShapeResult{std::move(out), std::move(values)}};
  }
  if (op == "Concat") return infer_concat(inputs, attrs);
  if (op == "Flatten") {
    const Shape& x = need(op, inputs, 0).shape;
    int64_t axis = attrs.get_int("axis", 1);
    if (axis < 0) axis += static_cast<int64_t>(x.size());
    if (axis < 0 || axis > static_cast<int64_t>(x.size())) fail(op, "axis out of range");
    return {ShapeResult{Shape{product(x, 0, axis), product(x, axis)}, std::nullopt}};
  }
  if (op == "Reshape") return infer_reshape(inputs, attrs);
  if (op == "Transpose") {
    const Shape& x = need(op, inputs, 0).shape;
    std::vector<int64_t> perm(x.size());
    std::iota(perm.rbegin(), perm.rend(), 0);
    perm = attrs.get_ints("perm").value_or(perm);
    if (perm.size() != x.size()) fail(op, "perm rank mismatch");
    Shape out(x.size());
    for (size_t i = 0; i < perm.size(); ++i) out[i] = x[normalize_axis(op, perm[i], x.size())];
    return {ShapeResult{out, std::nullopt}};
  }
  if (op == "Squeeze") {
    const ShapeOperand& x = need(op, inputs, 0);
    const auto axes = ints_from(inputs, 1, attrs, "axes", op);
    std::vector<bool> drop(x.shape.size(), false);
    if (axes) {
      for (int64_t a : *axes) {
        const int64_t n = normalize_axis(op, a, x.shape.size());
        if (x.shape[n] != 1) fail(op, "cannot squeeze dim of size " + std::to_string(x.shape[n]));
        drop[n] = true;
      }
    } else {
      for (size_t i = 0; i < x.shape.size(); ++i) drop[i] = x.shape[i] == 1;
    }
    Shape out;
    for (size_t i = 0; i < x.shape.size(); ++i) {
      if (!drop[i]) out.push_back(x.shape[i]);
    }
    return {ShapeResult{out, x.values}};
  }
  if (op == "Unsqueeze") {
    const ShapeOperand& x = need(op, inputs, 0);
    const auto axes = ints_from(inputs, 1, attrs, "axes", op);
    if (!axes) fail(op, "axes are required");
    const size_t rank = x.shape.size() + axes->size();
    std::vector<bool> inserted(rank, false);
    for (int64_t a : *axes) {
      const int64_t n = normalize_axis(op, a, rank);
      if (inserted[n]) fail(op, "duplicate axis");
      inserted[n] = true;
    }
    Shape out;
    size_t src = 0;
    for (size_t i = 0; i < rank; ++i) out.push_back(inserted[i] ? 1 : x.shape[src++]);
    return {ShapeResult{out, x.values}};
  }
  if (op == "Pad") {
    const Shape& x = need(op, inputs, 0).shape;
    const auto pads = ints_from(inputs, 1, attrs, "pads", op);
    if (!pads) fail(op, "pads are required");
    std::vector<int64_t> axes(x.size());
    std::iota(axes.begin(), axes.end(), 0);
    if (inputs.size() > 3 && inputs[3].present) {
      if (!inputs[3].values) fail(op, "axes are not statically known");
      axes = *inputs[3].values;
    }
    if (pads->size() != 2 * axes.size()) fail(op, "pads length must be twice the padded rank");
    Shape out = x;
    for (size_t i = 0; i < axes.size(); ++i) {
      const int64_t a = normalize_axis(op, axes[i], x.size());
      out[a] += (*pads)[i] + (*pads)[i + axes.size()];
      if (out[a] <= 0) fail(op, "padding removes the whole axis");
    }
    return {ShapeResult{out, std::nullopt}};
  }
  if (op == "ReduceMean") {
    const Shape& x = need(op, inputs, 0).shape;
    const bool keep = attrs.get_int("keepdims", 1) != 0;
    auto axes = ints_from(inputs, 1, attrs, "axes", op);
    if (!axes || axes->empty()) {
      if (attrs.get_int("noop_with_empty_axes", 0) != 0) return {ShapeResult{x, std::nullopt}};
      axes = std::vector<int64_t>(x.size());
      std::iota(axes->begin(), axes->end(), 0);
    }
    std::vector<bool> reduced(x.size(), false);
    for (int64_t a : *axes) reduced[normalize_axis(op, a, x.size())] = true;
    Shape out;
    for (size_t i = 0; i < x.size(); ++i) {
      if (!reduced[i]) out.push_back(x[i]);
      else if (keep) out.push_back(1);
    }
    return {ShapeResult{out, std::nullopt}};
  }
  if (op == "Split") return infer_split(inputs, attrs, num_outputs);
  if (op == "Slice") return infer_slice(inputs, attrs, opset);
  if (op == "Shape") {
    const Shape& x = need(op, inputs, 0).shape;
    const auto rank = static_cast<int64_t>(x.size());
    int64_t start = attrs.get_int("start", 0);
    int64_t end = attrs.get_int("end", rank);
    if (start < 0) start += rank;
    if (end < 0) end += rank;
    start = std::clamp<int64_t>(start, 0, rank);
    end = std::clamp<int64_t>(end, start, rank);
    return {ShapeResult{Shape{end - start}, std::vector<int64_t>(x.begin() + start, x.begin() + end)}};
  }
  if (op == "Gather") return infer_gather(inputs, attrs);
  throw MissingRule(std::string(op) + " has no shape rule");
}

std::vector<Shape> infer_node(std::string_view op_type, const std::vector<Shape>& input_shapes,
                              const Attributes& attrs) {
  std::vector<ShapeOperand> operands;
  for (const Shape& s : input_shapes) operands.push_back({s, std::nullopt, true});
  std::vector<Shape> out;
  for (ShapeResult& r : infer_node(op_type, operands, attrs, 1)) out.push_back(std::move(r.shape));
  return out;
}

namespace {

bool matches_stored(const Shape& inferred, const std::vector<Dim>& stored) {
  if (inferred.size() != stored.size()) return false;
  for (size_t i = 0; i < stored.size(); ++i) {
    if (stored[i].is_fixed() && *stored[i].value != inferred[i]) return false;
  }
  return true;
}

std::string format_stored(const std::vector<Dim>& dims) {
  std::string s;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += dims[i].is_fixed() ? std::to_string(*dims[i].value) : (dims[i].symbol.empty() ? "?" : dims[i].symbol);
  }
  return s.empty() ? "[]" : s;
}

}  // namespace

GraphIR infer_shapes(const GraphIR& source, const std::optional<Shape>& input_override) {
  GraphIR ir = source;
  bool check_stored = true;

  for (size_t i = 0; i < ir.inputs.size(); ++i) {
    TensorSpec& in = ir.tensors.at(ir.inputs[i]);
    if (i == 0 && input_override) {
      if (in.has_shape && in.shape != *input_override) check_stored = false;
      if (!in.has_shape) check_stored = false;
      in.shape = *input_override;
      in.has_shape = true;
    } else if (!in.has_shape) {
      if (i != 0) {
        throw RuleFailure("graph input '" + in.name + "' has no static shape");
      }
      Shape shape = kDefaultInputShape;
      shape[0] = ir.batch;
      in.shape = shape;
      in.has_shape = true;
      check_stored = false;
    }
    for (int64_t d : in.shape) {
      if (d <= 0) throw RuleFailure("graph input '" + in.name + "' has non-positive dim");
    }
  }

  for (const Node& node : ir.nodes) {
    std::vector<ShapeOperand> operands;
    for (const std::string& name : node.inputs) {
      if (name.empty()) {
        operands.push_back(ShapeOperand::absent());
        continue;
      }
      const TensorSpec& t = ir.tensors.at(name);
      if (!t.has_shape) {
        throw RuleFailure("node '" + node.name + "' (" + node.op_type + "): input '" + name + "' has no shape");
      }
      operands.push_back({t.shape, t.int_values, true});
    }
    std::vector<ShapeResult> results;
    try {
      results = infer_node(node.op_type, operands, node.attrs, node.outputs.size(), ir.opset);
    } catch (const RuleFailure& e) {
      throw RuleFailure("node '" + node.name + "' (" + node.op_type + "): " + e.what());
    } catch (const InvalidAttribute& e) {
      throw RuleFailure("node '" + node.name + "' (" + node.op_type + "): " + e.what());
    }
    if (results.size() < node.outputs.size()) {
      throw RuleFailure("node '" + node.name + "' (" + node.op_type + "): rule produced too few outputs");
    }
    for (size_t o = 0; o < node.outputs.size(); ++o) {
      const std::string& name = node.outputs[o];
      if (name.empty()) continue;
      TensorSpec& t = ir.tensors.at(name);
      for (int64_t d : results[o].shape) {
        if (d <= 0) {
          throw RuleFailure("node '" + node.name + "' (" + node.op_type + ") produces empty tensor " +
                            format_shape(results[o].shape));
        }
      }
      t.shape = std::move(results[o].shape);
      t.has_shape = true;
      const bool integral = !is_floating(t.elem_type) && t.elem_type != ElementType::kUndefined;
      if (integral && results[o].values && static_cast<int64_t>(results[o].values->size()) == t.element_count()) {
        t.int_values = std::move(results[o].values);
      } else {
        t.int_values.reset();
      }
      if (check_stored && t.stored_shape && !matches_stored(t.shape, *t.stored_shape)) {
        throw ShapeConflict("tensor '" + name + "' from node '" + node.name + "': inferred " +
                            format_shape(t.shape) + ", file records " + format_stored(*t.stored_shape));
      }
    }
  }
  ir.shapes_inferred = true;
  refresh_metadata_flags(ir);
  return ir;
}

}  // namespace edgecost
