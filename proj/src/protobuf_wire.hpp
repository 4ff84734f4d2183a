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

// Minimal Protocol Buffers wire-format reader. Only what ModelProto decoding
// needs: tag iteration, varints, fixed-width scalars, length-delimited slices,
// and skipping of unknown fields (including legacy groups).

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "edgecost/errors.hpp"

namespace edgecost::wire {

enum class WireType : uint32_t {
  kVarint = 0,
  kFixed64 = 1,
  kLengthDelimited = 2,
  kStartGroup = 3,
  kEndGroup = 4,
  kFixed32 = 5,
};

struct Tag {
  uint32_t field = 0;
  WireType type = WireType::kVarint;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  bool done() const { return pos_ >= data_.size(); }
  size_t position() const { return pos_; }

  Tag next_tag() {
    const uint64_t key = varint();
    const auto type = static_cast<uint32_t>(key & 7);
    const auto field = static_cast<uint32_t>(key >> 3);
    if (type > 5 || field == 0) {
      fail("invalid tag");
    }
    return Tag{field, static_cast<WireType>(type)};
  }

  uint64_t varint() {
    uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= data_.size()) {
        fail("unexpected end of buffer in varint");
      }
      const auto byte = static_cast<uint8_t>(data_[pos_++]);
      value |= static_cast<uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) {
        return value;
      }
    }
    fail("varint longer than 10 bytes");
  }

  int64_t int64() { return static_cast<int64_t>(varint()); }

  uint32_t fixed32() {
    uint32_t v;
    std::memcpy(&v, take(4).data(), 4);
    return v;
  }

  uint64_t fixed64() {
    uint64_t v;
    std::memcpy(&v, take(8).data(), 8);
    return v;
  }

  float float32() {
    const uint32_t bits = fixed32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }

  std::string_view bytes() {
    const uint64_t len = varint();
    if (len > data_.size() - pos_) {
      fail("length-delimited field runs past end of buffer");
    }
    return take(static_cast<size_t>(len));
  }

  std::string string() { return std::string(bytes()); }

  void skip(WireType type, uint32_t field) {
    switch (type) {
      case WireType::kVarint:
        varint();
        return;
      case WireType::kFixed64:
        take(8);
        return;
      case WireType::kLengthDelimited:
        bytes();
        return;
      case WireType::kFixed32:
        take(4);
        return;
      case WireType::kStartGroup:
        for (;;) {
          const Tag inner = next_tag();
          if (inner.type == WireType::kEndGroup) {
            if (inner.field != field) {
              fail("mismatched end-group tag");
            }
            return;
          }
          skip(inner.type, inner.field);
        }
      case WireType::kEndGroup:
        fail("unexpected end-group tag");
    }
  }

 private:
  std::string_view take(size_t n) {
    if (n > data_.size() - pos_) {
      fail("unexpected end of buffer");
    }
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  [[noreturn]] void fail(const char* what) const {
    throw MalformedFile(std::string(what) + " at offset " + std::to_string(pos_));
  }

  std::string_view data_;
  size_t pos_ = 0;
};

/// Iterates a repeated scalar field that may arrive packed (one
/// length-delimited blob) or unpacked (one tag per element).
template <typename Fn>
void for_each_varint(Reader& r, WireType type, Fn&& fn) {
  if (type == WireType::kLengthDelimited) {
    Reader packed(r.bytes());
    while (!packed.done()) {
      fn(packed.varint());
    }
  } else if (type == WireType::kVarint) {
    fn(r.varint());
  } else {
    throw MalformedFile("expected varint field");
  }
}

template <typename Fn>
void for_each_fixed32(Reader& r, WireType type, Fn&& fn) {
  if (type == WireType::kLengthDelimited) {
    const std::string_view blob = r.bytes();
    if (blob.size() % 4 != 0) {
      throw MalformedFile("packed fixed32 field has ragged length");
    }
    for (size_t i = 0; i < blob.size(); i += 4) {
      uint32_t v;
      std::memcpy(&v, blob.data() + i, 4);
      fn(v);
    }
  } else if (type == WireType::kFixed32) {
    fn(r.fixed32());
  } else {
    throw MalformedFile("expected fixed32 field");
  }
}

template <typename Fn>
void for_each_fixed64(Reader& r, WireType type, Fn&& fn) {
  if (type == WireType::kLengthDelimited) {
    const std::string_view blob = r.bytes();
    if (blob.size() % 8 != 0) {
      throw MalformedFile("packed fixed64 field has ragged length");
    }
    for (size_t i = 0; i < blob.size(); i += 8) {
      uint64_t v;
      std::memcpy(&v, blob.data() + i, 8);
      fn(v);
    }
  } else if (type == WireType::kFixed64) {
    fn(r.fixed64());
  } else {
    throw MalformedFile("expected fixed64 field");
  }
}

}  // namespace edgecost::wire
