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
#include <vector>

#include "unitts/common.hpp"
#include "unitts/mel.hpp"

namespace unitts {

inline constexpr int kSpeakerEmbeddingDim = 32;
inline constexpr uint64_t kSpeakerProjectionSeed = 0x5febedd117ull;

struct SpeakerEmbedding {
  std::vector<float> vector;  // unit L2 norm

  bool operator==(const SpeakerEmbedding& o) const = default;
};

// Dot product of unit-norm embeddings.
inline double speaker_similarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  if (a.vector.size() != b.vector.size()) throw ShapeError("embedding dim mismatch");
  double n2a = 0.0, n2b = 0.0, dot = 0.0;
  for (size_t i = 0; i < a.vector.size(); ++i) {
    n2a += double(a.vector[i]) * a.vector[i];
    n2b += double(b.vector[i]) * b.vector[i];
    dot += double(a.vector[i]) * b.vector[i];
  }
  if (std::abs(n2a - 1.0) > 1e-4 || std::abs(n2b - 1.0) > 1e-4)
    throw ShapeError("speaker_similarity requires unit-norm embeddings");
  return dot;
}

namespace speaker_detail {
// Fixed random projection from per-bin (mean, std) stats to the embedding
// space. Seeded once; not trained.
inline const std::vector<float>& projection(int in_dim) {
  static const std::vector<float> proj = [in_dim] {
    Rng rng(kSpeakerProjectionSeed);
    std::vector<float> p(static_cast<size_t>(kSpeakerEmbeddingDim) * in_dim);
    for (auto& x : p) x = static_cast<float>(rng.normal() / std::sqrt(double(in_dim)));
    return p;
  }();
  if (static_cast<int>(proj.size()) != kSpeakerEmbeddingDim * in_dim)
    throw ShapeError("speaker projection built for a different bin count");
  return proj;
}
}  // namespace speaker_detail

inline SpeakerEmbedding extract_speaker_embedding(const MelSpec& mel) {
  if (mel.frames < 1) throw ShapeError("extract_speaker_embedding: empty mel");
  const int stats_dim = 2 * mel.bins;
  std::vector<double> stats(stats_dim, 0.0);
  for (int b = 0; b < mel.bins; ++b) {
    double mean = 0.0;
    for (int f = 0; f < mel.frames; ++f) mean += mel.at(f, b);
    mean /= mel.frames;
    double var = 0.0;
    for (int f = 0; f < mel.frames; ++f) {
      double d = mel.at(f, b) - mean;
      var += d * d;
    }
    // Single-frame input: std defined as 0.
    double sd = mel.frames > 1 ? std::sqrt(var / mel.frames) : 0.0;
    stats[b] = mean;
    stats[mel.bins + b] = sd;
  }

  const auto& proj = speaker_detail::projection(stats_dim);
  std::vector<double> emb(kSpeakerEmbeddingDim, 0.0);
  for (int o = 0; o < kSpeakerEmbeddingDim; ++o) {
    double acc = 0.0;
    for (int i = 0; i < stats_dim; ++i) acc += double(proj[static_cast<size_t>(o) * stats_dim + i]) * stats[i];
    emb[o] = acc;
  }
  double n = 0.0;
  for (double v : emb) n += v * v;
  n = std::sqrt(n);
  if (n < 1e-12) {
    // Degenerate all-zero stats: fall back to a fixed unit vector.
    emb.assign(kSpeakerEmbeddingDim, 0.0);
    emb[0] = 1.0;
    n = 1.0;
  }
  SpeakerEmbedding out;
  out.vector.resize(kSpeakerEmbeddingDim);
  for (int i = 0; i < kSpeakerEmbeddingDim; ++i) out.vector[i] = static_cast<float>(emb[i] / n);
  return out;
}

}  // namespace unitts
