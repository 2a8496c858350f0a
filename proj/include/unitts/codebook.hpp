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
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "unitts/checkpoint.hpp"
#include "unitts/common.hpp"
#include "unitts/mel.hpp"
#include "unitts/nn.hpp"

namespace unitts {

struct UnitSeq {
  std::vector<int> units;

  bool empty() const { return units.empty(); }
  size_t size() const { return units.size(); }
  bool operator==(const UnitSeq& o) const = default;

  std::string str() const {
    std::ostringstream out;
    for (size_t i = 0; i < units.size(); ++i) {
      if (i) out << ' ';
      out << units[i];
    }
    return out.str();
  }
  static UnitSeq parse(const std::string& s) {
    UnitSeq u;
    std::istringstream in(s);
    int x;
    while (in >> x) u.units.push_back(x);
    return u;
  }
};

struct Codebook {
  int K = 64;
  int dim = kDefaultMelBins;
  int downsample = 2;  // mel frames per unit
  std::vector<float> centers;  // K x dim
  std::vector<double> objective_curve;  // mean squared distance per iteration

  const float* center(int j) const { return centers.data() + static_cast<size_t>(j) * dim; }

  Checkpoint to_checkpoint() const {
    Checkpoint ck;
    ck.put_scalar("codebook.K", static_cast<float>(K));
    ck.put_scalar("codebook.dim", static_cast<float>(dim));
    ck.put_scalar("codebook.downsample", static_cast<float>(downsample));
    ck.put_matrix("codebook.centers", K, dim, centers);
    return ck;
  }
  static Codebook from_checkpoint(const Checkpoint& ck) {
    Codebook cb;
    cb.K = static_cast<int>(ck.get_scalar("codebook.K"));
    cb.dim = static_cast<int>(ck.get_scalar("codebook.dim"));
    cb.downsample = static_cast<int>(ck.get_scalar("codebook.downsample"));
    cb.centers = ck.get("codebook.centers").data;
    if (cb.centers.size() != static_cast<size_t>(cb.K) * cb.dim)
      throw ShapeError("codebook center shape mismatch");
    return cb;
  }
};

// Mean-pool non-overlapping downsample-frame windows.
inline std::vector<float> pool_windows(const MelSpec& mel, int downsample, int* n_windows) {
  int n = mel.frames / downsample;
  *n_windows = n;
  std::vector<float> out(static_cast<size_t>(n) * mel.bins, 0.0f);
  for (int w = 0; w < n; ++w) {
    for (int j = 0; j < downsample; ++j) {
      const float* row = mel.row(w * downsample + j);
      for (int b = 0; b < mel.bins; ++b) out[static_cast<size_t>(w) * mel.bins + b] += row[b];
    }
    for (int b = 0; b < mel.bins; ++b) out[static_cast<size_t>(w) * mel.bins + b] /= downsample;
  }
  return out;
}

namespace codebook_detail {

// Assign each row of x to its nearest center; ties go to the lowest index.
inline void assign_nearest(const std::vector<float>& x, int n, int dim,
                           const std::vector<float>& centers, int K, std::vector<int>& out,
                           std::vector<float>* dist2_out = nullptr) {
  // d2 = |x|^2 - 2 x.c + |c|^2 with the cross term via gemm.
  std::vector<float> cross(static_cast<size_t>(n) * K);
  gemm<float>(false, true, n, K, dim, 1.0f, x.data(), centers.data(), 0.0f, cross.data());
  std::vector<double> c2(K, 0.0);
  for (int j = 0; j < K; ++j)
    for (int d = 0; d < dim; ++d) {
      double v = centers[static_cast<size_t>(j) * dim + d];
      c2[j] += v * v;
    }
  out.resize(n);
  if (dist2_out) dist2_out->resize(n);
  for (int i = 0; i < n; ++i) {
    double x2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      double v = x[static_cast<size_t>(i) * dim + d];
      x2 += v * v;
    }
    double best = 1e300;
    int bj = 0;
    for (int j = 0; j < K; ++j) {
      double d2 = x2 - 2.0 * double(cross[static_cast<size_t>(i) * K + j]) + c2[j];
      if (d2 < best - 1e-12) {
        best = d2;
        bj = j;
      }
    }
    out[i] = bj;
    if (dist2_out) (*dist2_out)[i] = static_cast<float>(std::max(best, 0.0));
  }
}

}  // namespace codebook_detail

namespace codebook_detail {

inline Codebook kmeans_once(const std::vector<float>& x, int n, int dim, int K, int downsample,
                            uint64_t seed, int max_iters) {
  // k-means++ seeding.
  Rng rng(seed);
  Codebook cb;
  cb.K = K;
  cb.dim = dim;
  cb.downsample = downsample;
  cb.centers.assign(static_cast<size_t>(K) * dim, 0.0f);
  std::vector<double> d2(n, 1e300);
  int first = static_cast<int>(rng.uniform_index(n));
  std::copy_n(x.begin() + static_cast<size_t>(first) * dim, dim, cb.centers.begin());
  for (int j = 1; j < K; ++j) {
    const float* prev = cb.centers.data() + static_cast<size_t>(j - 1) * dim;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = 0.0;
      for (int c = 0; c < dim; ++c) {
        double v = x[static_cast<size_t>(i) * dim + c] - prev[c];
        d += v * v;
      }
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    double pick = rng.uniform() * total;
    int idx = 0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= pick) {
        idx = i;
        break;
      }
    }
    std::copy_n(x.begin() + static_cast<size_t>(idx) * dim,  dim,
                cb.centers.begin() + static_cast<size_t>(j) * dim);
  }

  std::vector<int> assign(n);
  std::vector<float> dist2(n);
  std::vector<double> sums(static_cast<size_t>(K) * dim);
  std::vector<int> counts(K);
  for (int iter = 0; iter < max_iters; ++iter) {
    assign_nearest(x, n, dim, cb.centers, K, assign, &dist2);
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += dist2[i];
    cb.objective_curve.push_back(obj / n);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (int c = 0; c < dim; ++c)
        sums[static_cast<size_t>(assign[i]) * dim + c] += x[static_cast<size_t>(i) * dim + c];
    }
    double movement = 0.0;
    for (int j = 0; j < K; ++j) {
      if (counts[j] == 0) {
        // Re-seed an empty cluster at the farthest point (deterministic).
        int far = 0;
        for (int i = 1; i < n; ++i)
          if (dist2[i] > dist2[far]) far = i;
        for (int c = 0; c < dim; ++c) {
          double nv = x[static_cast<size_t>(far) * dim + c];
          double d = nv - cb.centers[static_cast<size_t>(j) * dim + c];
          movement += d * d;
          cb.centers[static_cast<size_t>(j) * dim + c] = static_cast<float>(nv);
        }
        dist2[far] = 0.0f;
        continue;
      }
      for (int c = 0; c < dim; ++c) {
        double nv = sums[static_cast<size_t>(j) * dim + c] / counts[j];
        double d = nv - cb.centers[static_cast<size_t>(j) * dim + c];
        movement += d * d;
        cb.centers[static_cast<size_t>(j) * dim + c] = static_cast<float>(nv);
      }
    }
    if (std::sqrt(movement) < 1e-6) break;
  }
  return cb;
}

}  // namespace codebook_detail

inline Codebook train_codebook(const std::vector<MelSpec>& mels, int K, int downsample,
                               uint64_t seed, int max_iters = 100) {
  if (K < 1) throw ConfigError("codebook size must be >= 1");
  if (downsample < 1) throw ConfigError("downsample must be >= 1");
  int dim = mels.empty() ? kDefaultMelBins : mels.front().bins;
  std::vector<float> x;
  for (const auto& mel : mels) {
    if (mel.bins != dim) throw ShapeError("mixed bin counts in codebook corpus");
    int n = 0;
    auto w = pool_windows(mel, downsample, &n);
    x.insert(x.end(), w.begin(), w.end());
  }
  int n = static_cast<int>(x.size()) / dim;
  if (n < K) throw TrainError("fewer pooled vectors than codebook entries: " + std::to_string(n));

  // Restarts guard against seeding two centers into one cluster; the lowest
  // final objective wins, deterministically.
  constexpr int kAttempts = 4;
  Codebook best;
  double best_obj = 1e300;
  for (int a = 0; a < kAttempts; ++a) {
    Codebook cb = codebook_detail::kmeans_once(x, n, dim, K, downsample,
                                               seed + 0x9e3779b9u * uint64_t(a), max_iters);
    if (cb.objective_curve.back() < best_obj - 1e-12) {
      best_obj = cb.objective_curve.back();
      best = std::move(cb);
    }
  }
  return best;
}

struct TokenizeResult {
  UnitSeq units;
  bool too_short = false;  // frames < downsample
};

inline TokenizeResult tokenize(const MelSpec& mel, const Codebook& cb) {
  if (mel.bins != cb.dim) throw ShapeError("mel bins do not match codebook dim");
  TokenizeResult res;
  if (mel.frames < cb.downsample) {
    res.too_short = true;
    return res;
  }
  int n = 0;
  auto x = pool_windows(mel, cb.downsample, &n);
  std::vector<int> assign;
  codebook_detail::assign_nearest(x, n, cb.dim, cb.centers, cb.K, assign);
  res.units.units = std::move(assign);
  return res;
}

struct UtilizationReport {
  double utilization = 0.0;  // fraction of codes used
  double entropy_bits = 0.0;
};

inline UtilizationReport codebook_utilization(const std::vector<UnitSeq>& corpus, const Codebook& cb) {
  if (corpus.empty()) throw ShapeError("empty unit corpus");
  std::vector<size_t> counts(cb.K, 0);
  size_t total = 0;
  for (const auto& u : corpus)
    for (int id : u.units) {
      if (id < 0 || id >= cb.K) throw ShapeError("unit id out of range");
      ++counts[id];
      ++total;
    }
  UtilizationReport rep;
  if (total == 0) return rep;
  int used = 0;
  double h = 0.0;
  for (int j = 0; j < cb.K; ++j) {
    if (!counts[j]) continue;
    ++used;
    double p = double(counts[j]) / double(total);
    h -= p * std::log2(p);
  }
  rep.utilization = double(used) / cb.K;
  rep.entropy_bits = h;
  return rep;
}

}  // namespace unitts
