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

#include "edgecost/model_io.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstring>
#include <numeric>

#include "edgecost/errors.hpp"
#include "protobuf_wire.hpp"

namespace edgecost {

int64_t element_byte_width(ElementType type) {
  switch (type) {
    case ElementType::kFloat:
    case ElementType::kInt32:
    case ElementType::kUint32:
      return 4;
    case ElementType::kUint8:
    case ElementType::kInt8:
    case ElementType::kBool:
      return 1;
    case ElementType::kUint16:
    case ElementType::kInt16:
    case ElementType::kFloat16:
    case ElementType::kBfloat16:
      return 2;
    case ElementType::kInt64:
    case ElementType::kDouble:
    case ElementType::kUint64:
    case ElementType::kComplex64:
      return 8;
    case ElementType::kComplex128:
      return 16;
    case ElementType::kUndefined:
    case ElementType::kString:
      return 0;
  }
  return 0;
}

bool is_floating(ElementType type) {
  return type == ElementType::kFloat || type == ElementType::kFloat16 ||
         type == ElementType::kDouble || type == ElementType::kBfloat16;
}

std::string_view element_type_name(ElementType type) {
  switch (type) {
    case ElementType::kUndefined: return "undefined";
    case ElementType::kFloat: return "float32";
    case ElementType::kUint8: return "uint8";
    case ElementType::kInt8: return "int8";
    case ElementType::kUint16: return "uint16";
    case ElementType::kInt16: return "int16";
    case ElementType::kInt32: return "int32";
    case ElementType::kInt64: return "int64";
    case ElementType::kString: return "string";
    case ElementType::kBool: return "bool";
    case ElementType::kFloat16: return "float16";
    case ElementType::kDouble: return "float64";
    case ElementType::kUint32: return "uint32";
    case ElementType::kUint64: return "uint64";
    case ElementType::kComplex64: return "complex64";
    case ElementType::kComplex128: return "complex128";
    case ElementType::kBfloat16: return "bfloat16";
  }
  return "unknown";
}

int64_t TensorInfo::element_count() const {
  return std::accumulate(dims.begin(), dims.end(), int64_t{1}, std::multiplies<>());
}

namespace {

using wire::Reader;
using wire::Tag;
using wire::WireType;

// Read-only mapping of a whole file. Tensor payloads are referenced through
// string_views into the mapping and never copied.
class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) {
      throw FileNotFound("file not found: " + path.string());
    }
    struct stat st {};
    if (::fstat(fd_, &st) != 0 || !S_ISREG(st.st_mode)) {
      ::close(fd_);
      throw FileNotFound("not a regular file: " + path.string());
    }
    size_ = static_cast<size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd_, 0);
      if (p == MAP_FAILED) {
        ::close(fd_);
        throw MalformedFile("cannot map " + path.string() + ": " + std::strerror(errno));
      }
      data_ = static_cast<const char*>(p);
    }
  }
  ~MappedFile() {
    if (data_ != nullptr) {
      ::munmap(const_cast<char*>(data_), size_);
    }
    if (fd_ >= 0) {
      ::close(fd_);
    }
  }
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::string_view view() const { return {data_, size_}; }

 private:
  int fd_ = -1;
  const char* data_ = nullptr;
  size_t size_ = 0;
};

bool retains_values(ElementType type) {
  return type == ElementType::kInt64 || type == ElementType::kInt32;
}

TensorInfo parse_tensor(std::string_view bytes, const std::filesystem::path& base_dir) {
  TensorInfo t;
  Reader r(bytes);
  std::string_view raw;
  bool has_raw = false;
  int64_t typed_count = 0;
  bool has_typed = false;
  std::vector<int64_t> typed_ints;
  bool external_location_flag = false;
  std::string ext_location;
  std::optional<uint64_t> ext_offset, ext_length;

  while (!r.done()) {
    const Tag tag = r.next_tag();
    switch (tag.field) {
      case 1:  // dims
        wire::for_each_varint(r, tag.type, [&](uint64_t v) { t.dims.push_back(static_cast<int64_t>(v)); });
        break;
      case 2:  // data_type
        t.elem_type = static_cast<ElementType>(r.varint());
        break;
      case 4:  // float_data
        has_typed = true;
        wire::for_each_fixed32(r, tag.type, [&](uint32_t) { ++typed_count; });
        break;
      case 5:  // int32_data
      case 7:  // int64_data
      case 11:  // uint64_data
        has_typed = true;
        wire::for_each_varint(r, tag.type, [&](uint64_t v) {
          ++typed_count;
          if (tag.field == 5) {
            typed_ints.push_back(static_cast<int32_t>(v));
          } else {
            typed_ints.push_back(static_cast<int64_t>(v));
          }
        });
        break;
      case 6:  // string_data
        has_typed = true;
        r.bytes();
        ++typed_count;
        break;
      case 8:
        t.name = r.string();
        break;
      case 9:
        raw = r.bytes();
        has_raw = true;
        break;
      case 10:  // double_data
        has_typed = true;
        wire::for_each_fixed64(r, tag.type, [&](uint64_t) { ++typed_count; });
        break;
      case 13: {  // external_data
        Reader entry(r.bytes());
        std::string key, value;
        while (!entry.done()) {
          const Tag et = entry.next_tag();
          if (et.field == 1) {
            key = entry.string();
          } else if (et.field == 2) {
            value = entry.string();
          } else {
            entry.skip(et.type, et.field);
          }
        }
        try {
          if (key == "location") {
            ext_location = value;
          } else if (key == "offset") {
            ext_offset = std::stoull(value);
          } else if (key == "length") {
            ext_length = std::stoull(value);
          }
        } catch (const std::exception&) {
          throw MalformedFile("bad external_data entry '" + key + "' on tensor " + t.name);
        }
        break;
      }
      case 14:  // data_location
        external_location_flag = r.varint() == 1;
        break;
      default:
        r.skip(tag.type, tag.field);
    }
  }

  for (int64_t d : t.dims) {
    if (d < 0) {
      throw MalformedFile("tensor " + t.name + " has a negative dimension");
    }
  }
  const int64_t count = t.element_count();
  const int64_t width = element_byte_width(t.elem_type);
  const auto expected = static_cast<uint64_t>(count * width);

  if (external_location_flag || !ext_location.empty()) {
    if (ext_location.empty()) {
      throw MalformedFile("external tensor " + t.name + " has no location");
    }
    const std::filesystem::path file = base_dir / ext_location;
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(file, ec);
    if (ec) {
      throw MalformedFile("external data file missing for tensor " + t.name + ": " + file.string());
    }
    const uint64_t offset = ext_offset.value_or(0);
    if (offset > file_size) {
      throw MalformedFile("external data offset past end of file for tensor " + t.name);
    }
    const uint64_t length = ext_length.value_or(file_size - offset);
    if (offset + length > file_size) {
      throw MalformedFile("external data for tensor " + t.name + " runs past end of file");
    }
    t.external = true;
    t.payload_byte_length = length;
    if (width > 0 && length != expected) {
      throw MalformedFile("external data length of tensor " + t.name + " disagrees with its shape");
    }
    return t;
  }

  if (has_raw) {
    t.payload_byte_length = raw.size();
    if (width > 0 && raw.size() != expected) {
      throw MalformedFile("raw_data length of tensor " + t.name + " disagrees with its shape");
    }
    if (retains_values(t.elem_type) && count <= kMaxRetainedIntElements) {
      std::vector<int64_t> values(static_cast<size_t>(count));
      for (int64_t i = 0; i < count; ++i) {
        if (t.elem_type == ElementType::kInt64) {
          int64_t v;
          std::memcpy(&v, raw.data() + i * 8, 8);
          values[i] = v;
        } else {
          int32_t v;
          std::memcpy(&v, raw.data() + i * 4, 4);
          values[i] = v;
        }
      }
      t.int_values = std::move(values);
    }
    return t;
  }

  if (has_typed) {
    if (typed_count != count) {
      throw MalformedFile("typed data of tensor " + t.name + " has " + std::to_string(typed_count) +
                          " elements, shape implies " + std::to_string(count));
    }
    t.payload_byte_length = width > 0 ? expected : 0;
    if (retains_values(t.elem_type) && count <= kMaxRetainedIntElements) {
      t.int_values = std::move(typed_ints);
    }
    return t;
  }

  if (count != 0) {
    throw MalformedFile("tensor " + t.name + " carries no data");
  }
  if (retains_values(t.elem_type)) {
    t.int_values = std::vector<int64_t>{};
  }
  return t;
}

std::vector<Dim> parse_shape(std::string_view bytes) {
  std::vector<Dim> dims;
  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    if (tag.field != 1) {
      r.skip(tag.type, tag.field);
      continue;
    }
    Reader dr(r.bytes());
    Dim dim;
    while (!dr.done()) {
      const Tag dt = dr.next_tag();
      if (dt.field == 1) {
        dim.value = dr.int64();
      } else if (dt.field == 2) {
        dim.symbol = dr.string();
      } else {
        dr.skip(dt.type, dt.field);
      }
    }
    dims.push_back(std::move(dim));
  }
  return dims;
}

ValueInfo parse_value_info(std::string_view bytes) {
  ValueInfo vi;
  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    if (tag.field == 1) {
      vi.name = r.string();
    } else if (tag.field == 2) {
      Reader tr(r.bytes());
      while (!tr.done()) {
        const Tag tt = tr.next_tag();
        if (tt.field != 1) {  // only tensor_type
          tr.skip(tt.type, tt.field);
          continue;
        }
        Reader tensor(tr.bytes());
        while (!tensor.done()) {
          const Tag t = tensor.next_tag();
          if (t.field == 1) {
            vi.elem_type = static_cast<ElementType>(tensor.varint());
          } else if (t.field == 2) {
            vi.dims = parse_shape(tensor.bytes());
          } else {
            tensor.skip(t.type, t.field);
          }
        }
      }
    } else {
      r.skip(tag.type, tag.field);
    }
  }
  return vi;
}

std::pair<std::string, AttrValue> parse_attribute(std::string_view bytes,
                                                  const std::filesystem::path& base_dir) {
  enum : int64_t { kFloat = 1, kInt = 2, kString = 3, kTensor = 4, kFloats = 6, kInts = 7 };
  std::string name;
  int64_t type = 0;
  std::optional<float> f;
  std::optional<int64_t> i;
  std::optional<std::string> s;
  std::optional<TensorInfo> t;
  std::vector<float> floats;
  std::vector<int64_t> ints;

  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    switch (tag.field) {
      case 1:
        name = r.string();
        break;
      case 2:
        f = r.float32();
        break;
      case 3:
        i = r.int64();
        break;
      case 4:
        s = r.string();
        break;
      case 5:
        t = parse_tensor(r.bytes(), base_dir);
        break;
      case 7:
        wire::for_each_fixed32(r, tag.type, [&](uint32_t bits) {
          float v;
          std::memcpy(&v, &bits, 4);
          floats.push_back(v);
        });
        break;
      case 8:
        wire::for_each_varint(r, tag.type, [&](uint64_t v) { ints.push_back(static_cast<int64_t>(v)); });
        break;
      case 20:
        type = r.int64();
        break;
      default:
        r.skip(tag.type, tag.field);
    }
  }

  // Old writers omit `type`; infer it from whichever field is populated.
  if (type == 0) {
    if (t) type = kTensor;
    else if (s) type = kString;
    else if (i) type = kInt;
    else if (f) type = kFloat;
    else if (!ints.empty()) type = kInts;
    else if (!floats.empty()) type = kFloats;
  }
  switch (type) {
    case kFloat: return {name, f.value_or(0.0f)};
    case kInt: return {name, i.value_or(0)};
    case kString: return {name, s.value_or("")};
    case kTensor:
      if (!t) throw MalformedFile("tensor attribute " + name + " has no tensor");
      return {name, std::move(*t)};
    case kFloats: return {name, std::move(floats)};
    case kInts: return {name, std::move(ints)};
    default:
      // Graphs, sparse tensors and string lists are irrelevant to static
      // sizing; control-flow ops that carry them are rejected later.
      return {name, std::string{}};
  }
}

RawNode parse_node(std::string_view bytes, const std::filesystem::path& base_dir) {
  RawNode node;
  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    switch (tag.field) {
      case 1:
        node.inputs.push_back(r.string());
        break;
      case 2:
        node.outputs.push_back(r.string());
        break;
      case 3:
        node.name = r.string();
        break;
      case 4:
        node.op_type = r.string();
        break;
      case 5: {
        auto [name, value] = parse_attribute(r.bytes(), base_dir);
        node.attributes.insert_or_assign(std::move(name), std::move(value));
        break;
      }
      case 7:
        node.domain = r.string();
        break;
      default:
        r.skip(tag.type, tag.field);
    }
  }
  if (node.op_type.empty()) {
    throw MalformedFile("node '" + node.name + "' has no op_type");
  }
  if (node.outputs.empty()) {
    throw MalformedFile("node '" + node.name + "' has no outputs");
  }
  return node;
}

void parse_graph(std::string_view bytes, const std::filesystem::path& base_dir, RawModel& model) {
  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    switch (tag.field) {
      case 1:
        model.nodes.push_back(parse_node(r.bytes(), base_dir));
        break;
      case 2:
        model.graph_name = r.string();
        break;
      case 5:
        model.initializers.push_back(parse_tensor(r.bytes(), base_dir));
        break;
      case 11:
        model.graph_inputs.push_back(parse_value_info(r.bytes()));
        break;
      case 12:
        model.graph_outputs.push_back(parse_value_info(r.bytes()));
        break;
      case 13:
        model.value_infos.push_back(parse_value_info(r.bytes()));
        break;
      default:
        r.skip(tag.type, tag.field);
    }
  }
}

}  // namespace

RawModel parse_model(std::string_view bytes, const std::filesystem::path& base_dir) {
  RawModel model;
  bool has_graph = false;
  bool has_default_opset = false;
  Reader r(bytes);
  while (!r.done()) {
    const Tag tag = r.next_tag();
    switch (tag.field) {
      case 1:
        model.ir_version = r.int64();
        break;
      case 7:
        parse_graph(r.bytes(), base_dir, model);
        has_graph = true;
        break;
      case 8: {
        Reader op(r.bytes());
        std::string domain;
        int64_t version = 0;
        while (!op.done()) {
          const Tag ot = op.next_tag();
          if (ot.field == 1) {
            domain = op.string();
          } else if (ot.field == 2) {
            version = op.int64();
          } else {
            op.skip(ot.type, ot.field);
          }
        }
        if (domain.empty() || domain == "ai.onnx") {
          model.opset_version = version;
          has_default_opset = true;
        }
        break;
      }
      default:
        r.skip(tag.type, tag.field);
    }
  }
  if (!has_graph) {
    throw UnsupportedModel("model has no graph");
  }
  if (model.nodes.empty()) {
    throw UnsupportedModel("graph '" + model.graph_name + "' has no nodes");
  }
  if (has_default_opset && model.opset_version < 7) {
    throw UnsupportedModel("opset " + std::to_string(model.opset_version) + " is older than 7");
  }
  return model;
}

RawModel load_model(const std::filesystem::path& path) {
  const MappedFile file(path);
  return parse_model(file.view(), path.parent_path());
}

}  // namespace edgecost
