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

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

inline constexpr int kDefaultMelBins = 40;

// Log-mel spectrogram, frames x bins, row-major.
struct MelSpec {
  int frames = 0;
  int bins = kDefaultMelBins;
  std::vector<float> values;  // frames * bins

  MelSpec() = default;
  MelSpec(int f, int b) : frames(f), bins(b), values(static_cast<size_t>(f) * b, 0.0f) {}

  float& at(int f, int b) { return values[static_cast<size_t>(f) * bins + b]; }
  float at(int f, int b) const { return values[static_cast<size_t>(f) * bins + b]; }
  const float* row(int f) const { return values.data() + static_cast<size_t>(f) * bins; }
  float* row(int f) { return values.data() + static_cast<size_t>(f) * bins; }

  bool operator==(const MelSpec& o) const = default;

  bool all_finite() const {
    for (float v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline double mel_mean_abs_diff(const MelSpec& a, const MelSpec& b) {
  if (a.frames != b.frames || a.bins != b.bins)
    throw ShapeError("mel shape mismatch: " + std::to_string(a.frames) + "x" + std::to_string(a.bins) +
                     " vs " + std::to_string(b.frames) + "x" + std::to_string(b.bins));
  if (a.values.empty()) return 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) acc += std::abs(double(a.values[i]) - double(b.values[i]));
  return acc / double(a.values.size());
}

// Flat fixture format: magic "MELB", u32 frames, u32 bins, f32 row-major,
// little-endian.
inline void save_mel(const MelSpec& mel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for write: " + path);
  out.write("MELB", 4);
  uint32_t f = static_cast<uint32_t>(mel.frames), b = static_cast<uint32_t>(mel.bins);
  out.write(reinterpret_cast<const char*>(&f), 4);
  out.write(reinterpret_cast<const char*>(&b), 4);
  out.write(reinterpret_cast<const char*>(mel.values.data()),
            static_cast<std::streamsize>(mel.values.size() * sizeof(float)));
  if (!out) throw FormatError("short write: " + path);
}

inline MelSpec load_mel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open for read: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MELB", 4) != 0) throw FormatError("bad mel magic in " + path);
  uint32_t f = 0, b = 0;
  in.read(reinterpret_cast<char*>(&f), 4);
  in.read(reinterpret_cast<char*>(&b), 4);
  if (!in) throw FormatError("truncated mel header in " + path);
  MelSpec mel(static_cast<int>(f), static_cast<int>(b));
  in.read(reinterpret_cast<char*>(mel.values.data()),
          static_cast<std::streamsize>(mel.values.size() * sizeof(float)));
  if (!in) throw FormatError("truncated mel payload in " + path);
  return mel;
}

}  // namespace unitts
