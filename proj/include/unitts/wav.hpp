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

#include <algorithm>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

inline constexpr int kDefaultSampleRate = 8000;

struct Waveform {
  std::vector<float> samples;  // amplitudes in [-1, 1]
  int sample_rate = kDefaultSampleRate;

  void clamp() {
    for (float& s : samples) s = std::clamp(s, -1.0f, 1.0f);
  }
};

// Canonical 44-byte PCM16 mono WAV.
inline void save_wav(const Waveform& w, const std::string& path) {
  if (w.sample_rate <= 0) throw FormatError("sample_rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for write: " + path);
  auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<uint32_t>(w.sample_rate));
  put_u32(static_cast<uint32_t>(w.sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (float s : w.samples) {
    float c = std::clamp(s, -1.0f, 1.0f);
    int16_t q = static_cast<int16_t>(std::lround(c * 32767.0f));
    out.write(reinterpret_cast<const char*>(&q), 2);
  }
  if (!out) throw FormatError("short write: " + path);
}

inline Waveform load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open for read: " + path);
  char tag[4];
  auto get_u32 = [&]() {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto get_u16 = [&]() {
    uint16_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 2);
    return v;
  };
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) throw FormatError("not a RIFF file: " + path);
  get_u32();
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) throw FormatError("not a WAVE file: " + path);

  Waveform w;
  bool have_fmt = false;
  while (in.read(tag, 4)) {
    uint32_t chunk = get_u32();
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      uint16_t fmt = get_u16(), channels = get_u16();
      uint32_t rate = get_u32();
      get_u32();
      get_u16();
      uint16_t bits = get_u16();
      if (fmt != 1 || channels != 1 || bits != 16)
        throw FormatError("unsupported WAV encoding (need PCM16 mono): " + path);
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
      if (chunk > 16) in.seekg(chunk - 16, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("WAV data chunk before fmt: " + path);
      size_t n = chunk / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t q = 0;
        in.read(reinterpret_cast<char*>(&q), 2);
        w.samples[i] = static_cast<float>(q) / 32767.0f;
      }
      if (!in) throw FormatError("truncated WAV data in " + path);
      return w;
    } else {
      in.seekg(chunk, std::ios::cur);
    }
  }
  throw FormatError("WAV file has no data chunk: " + path);
}

}  // namespace unitts
