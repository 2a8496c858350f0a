// Copyright (c) 2026 The unitts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

// Binary tensor container. Layout, all little-endian:
//   magic "BVCK", u32 version, u32 tensor count,
//   per tensor: u32 name length, name bytes, u32 dtype tag (0 = f32),
//               u32 rank, u64 dims[rank], u64 payload byte offset,
//   payload (f32 row-major), trailing u32 CRC32 over everything before it.
struct Tensor {
  std::vector<uint64_t> dims;
  std::vector<float> data;

  uint64_t elems() const {
    uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
  bool operator==(const Tensor& o) const = default;
};

class Checkpoint {
 public:
  void put(const std::string& name, Tensor t) {
    if (t.elems() != t.data.size()) throw ShapeError("tensor dims do not match payload: " + name);
    if (tensors_.count(name)) throw FormatError("duplicate tensor name: " + name);
    tensors_[name] = std::move(t);
  }

  void put_vector(const std::string& name, const std::vector<float>& v) {
    put(name, Tensor{{v.size()}, v});
  }

  void put_matrix(const std::string& name, uint64_t rows, uint64_t cols,
                  const std::vector<float>& v) {
    put(name, Tensor{{rows, cols}, v});
  }

  void put_scalar(const std::string& name, float v) { put(name, Tensor{{1}, {v}}); }

  bool has(const std::string& name) const { return tensors_.count(name) != 0; }

  const Tensor& get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw FormatError("missing tensor: " + name);
    return it->second;
  }

  float get_scalar(const std::string& name) const {
    const Tensor& t = get(name);
    if (t.data.size() != 1) throw ShapeError("tensor is not a scalar: " + name);
    return t.data[0];
  }

  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  static uint32_t crc32(const uint8_t* data, size_t n, uint32_t crc = 0) {
    static const auto table = [] {
      std::array<uint32_t, 256> t{};
      for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
        t[i] = c;
      }
      return t;
    }();
    crc = ~crc;
    for (size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return ~crc;
  }

  void save(const std::string& path) const {
    std::string buf;
    auto put_bytes = [&](const void* p, size_t n) {
      buf.append(reinterpret_cast<const char*>(p), n);
    };
    auto put_u32 = [&](uint32_t v) { put_bytes(&v, 4); };
    auto put_u64 = [&](uint64_t v) { put_bytes(&v, 8); };

    buf.append("BVCK");
    put_u32(kVersion);
    put_u32(static_cast<uint32_t>(tensors_.size()));
    uint64_t offset = 0;
    for (const auto& [name, t] : tensors_) {
      put_u32(static_cast<uint32_t>(name.size()));
      buf.append(name);
      put_u32(0);  // dtype f32
      put_u32(static_cast<uint32_t>(t.dims.size()));
      for (auto d : t.dims) put_u64(d);
      put_u64(offset);
      offset += t.data.size() * sizeof(float);
    }
    for (const auto& [name, t] : tensors_)
      put_bytes(t.data.data(), t.data.size() * sizeof(float));

    uint32_t crc = crc32(reinterpret_cast<const uint8_t*>(buf.data()), buf.size());
    put_u32(crc);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for write: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("short write: " + path);
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open for read: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 + 4) throw FormatError("checkpoint too small: " + path);

    uint32_t stored_crc = 0;
    std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
    uint32_t actual = crc32(reinterpret_cast<const uint8_t*>(buf.data()), buf.size() - 4);
    if (stored_crc != actual) throw FormatError("checkpoint CRC mismatch: " + path);

    size_t pos = 0;
    auto need = [&](size_t n) {
      if (pos + n > buf.size() - 4) throw FormatError("truncated checkpoint: " + path);
    };
    auto get_u32 = [&]() {
      need(4);
      uint32_t v;
      std::memcpy(&v, buf.data() + pos, 4);
      pos += 4;
      return v;
    };
    auto get_u64 = [&]() {
      need(8);
      uint64_t v;
      std::memcpy(&v, buf.data() + pos, 8);
      pos += 8;
      return v;
    };

    need(4);
    if (buf.compare(0, 4, "BVCK") != 0) throw FormatError("bad checkpoint magic: " + path);
    pos = 4;
    uint32_t version = get_u32();
    if (version != kVersion)
      throw FormatError("unsupported checkpoint version " + std::to_string(version));
    uint32_t count = get_u32();

    struct Entry {
      std::string name;
      std::vector<uint64_t> dims;
      uint64_t offset;
    };
    std::vector<Entry> entries(count);
    for (auto& e : entries) {
      uint32_t len = get_u32();
      need(len);
      e.name = buf.substr(pos, len);
      pos += len;
      uint32_t dtype = get_u32();
      if (dtype != 0) throw FormatError("unsupported dtype tag in " + e.name);
      uint32_t rank = get_u32();
      e.dims.resize(rank);
      for (auto& d : e.dims) d = get_u64();
      e.offset = get_u64();
    }

    size_t payload_start = pos;
    size_t payload_len = buf.size() - 4 - payload_start;
    Checkpoint ck;
    uint64_t expected_offset = 0;
    for (const auto& e : entries) {
      Tensor t;
      t.dims = e.dims;
      uint64_t bytes = t.elems() * sizeof(float);
      if (e.offset != expected_offset)
        throw FormatError("overlapping or out-of-order tensor payload: " + e.name);
      expected_offset += bytes;
      if (e.offset + bytes > payload_len) throw FormatError("tensor payload out of range: " + e.name);
      t.data.resize(t.elems());
      std::memcpy(t.data.data(), buf.data() + payload_start + e.offset, bytes);
      ck.put(e.name, std::move(t));
    }
    return ck;
  }

  bool operator==(const Checkpoint& o) const = default;

 private:
  static constexpr uint32_t kVersion = 1;
  std::map<std::string, Tensor> tensors_;
};

}  // namespace unitts
