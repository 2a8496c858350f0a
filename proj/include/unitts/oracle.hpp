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
#include <array>
#include <cmath>
#include <vector>

#include "unitts/common.hpp"
#include "unitts/mel.hpp"
#include "unitts/phones.hpp"

// Procedural ground-truth speaker. Synthesis writes log-mel frames directly:
// the lowest kPitchChannels carry a tone contour as a moving spectral bump,
// the remaining channels carry one smooth envelope per base phoneme, warped
// along the bin axis by the speaker's formant shift and tilted by a linear
// ramp. The decoder inverts the speaker warp by grid search and recovers the
// phone sequence exactly on clean input.

namespace unitts {

inline constexpr int kPitchChannels = 4;
inline constexpr int kTemplateChannels = kDefaultMelBins - kPitchChannels;  // 36
inline constexpr int kFramesPerPhonemeBase = 4;
inline constexpr uint64_t kOracleTemplateSeed = 0x0badc0de5eedull;

struct SpeakerParams {
  double f0_base = 200.0;       // Hz, in [60, 400]
  double formant_shift = 1.0;   // multiplicative, in [0.7, 1.4]
  double spectral_tilt = 0.0;   // ramp coefficient, in [-0.6, 0.6]
  double rate = 1.0;            // frames-per-phoneme multiplier, in [0.5, 2.0]
  uint64_t seed = 0;            // per-speaker idiosyncrasy

  bool operator==(const SpeakerParams& o) const = default;
};

inline void validate_speaker_params(const SpeakerParams& p) {
  if (!(p.f0_base >= 60.0 && p.f0_base <= 400.0))
    throw ConfigError("f0_base out of [60, 400]");
  if (!(p.formant_shift >= 0.7 && p.formant_shift <= 1.4))
    throw ConfigError("formant_shift out of [0.7, 1.4]");
  if (!(p.spectral_tilt >= -0.6 && p.spectral_tilt <= 0.6))
    throw ConfigError("spectral_tilt out of [-0.6, 0.6]");
  if (!(p.rate >= 0.5 && p.rate <= 2.0)) throw ConfigError("rate out of [0.5, 2.0]");
}

inline int frames_per_phoneme(double rate) {
  return static_cast<int>(std::lround(kFramesPerPhonemeBase * rate));
}

namespace oracle_detail {

// Tone classes: 0 = no tone token follows, 1..5 = tones. Shape value is a
// pitch level in [0, 1] over normalized time within the phoneme.
inline double tone_shape(int tone_class, double t) {
  switch (tone_class) {
    case 0: return 0.05;
    case 1: return 0.95;
    case 2: return 0.25 + 0.70 * t;
    case 3: return 0.50 - 0.45 * std::sin(3.141592653589793 * t);
    case 4: return 0.95 - 0.70 * t;
    case 5: return 0.35;
    default: throw InventoryError("bad tone class");
  }
}

inline constexpr double kBumpSigma = 0.6;

// Pitch-band energies for a shape value. The bump is truncated at the band
// edges, so the decoder matches against the centroid of these energies rather
// than the raw shape value.
inline std::array<double, kPitchChannels> pitch_band(double shape, double amplitude) {
  std::array<double, kPitchChannels> e{};
  double pos = shape * (kPitchChannels - 1);
  for (int c = 0; c < kPitchChannels; ++c) {
    double d = c - pos;
    e[c] = amplitude * std::exp(-d * d / (2.0 * kBumpSigma * kBumpSigma));
  }
  return e;
}

inline double pitch_centroid(const std::array<double, kPitchChannels>& e) {
  double num = 0.0, den = 0.0;
  for (int c = 0; c < kPitchChannels; ++c) {
    double v = std::max(e[c], 0.0);
    num += c * v;
    den += v;
  }
  if (den <= 1e-12) return 0.0;
  return num / den / (kPitchChannels - 1);
}

// Centroid that clean synthesis produces for a given shape value; the decoder
// compares measured centroids against this curve.
inline double measured_shape(double shape) {
  return pitch_centroid(pitch_band(shape, 1.0));
}

inline double pitch_amplitude(double f0_base) { return 1.0 + f0_base / 160.0; }

struct TemplateBank {
  // Unit-norm smooth envelopes, orthogonal to the constant and ramp
  // directions, pairwise well separated.
  std::vector<std::array<double, kTemplateChannels>> shapes;  // kNumBasePhones
  std::array<double, kTemplateChannels> baseline{};
  std::array<double, kTemplateChannels> ramp{};  // unit norm
  double template_scale = 0.55;
  double min_pairwise_dist = 0.0;
};

inline std::array<double, kTemplateChannels> smooth_random(Rng& rng, int max_harmonic = 12) {
  std::array<double, kTemplateChannels> v{};
  for (int h = 1; h <= max_harmonic; ++h) {
    double amp = rng.normal() / std::sqrt(double(h));
    double phase = rng.uniform(0.0, 6.283185307179586);
    for (int i = 0; i < kTemplateChannels; ++i) {
      double x = (i + 0.5) / kTemplateChannels;
      v[i] += amp * std::cos(3.141592653589793 * h * x + phase);
    }
  }
  return v;
}

inline void project_out(std::array<double, kTemplateChannels>& v,
                        const std::array<double, kTemplateChannels>& dir) {
  double dot = 0.0;
  for (int i = 0; i < kTemplateChannels; ++i) dot += v[i] * dir[i];
  for (int i = 0; i < kTemplateChannels; ++i) v[i] -= dot * dir[i];
}

inline double norm(const std::array<double, kTemplateChannels>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline const TemplateBank& template_bank() {
  static const TemplateBank bank = [] {
    TemplateBank b;
    for (int i = 0; i < kTemplateChannels; ++i) {
      double x = (i + 0.5) / kTemplateChannels;
      b.baseline[i] = 1.6 + 0.3 * std::cos(6.283185307179586 * x);
      b.ramp[i] = i - (kTemplateChannels - 1) / 2.0;
    }
    double rn = norm(b.ramp);
    for (auto& r : b.ramp) r /= rn;
    std::array<double, kTemplateChannels> ones{};
    ones.fill(1.0 / std::sqrt(double(kTemplateChannels)));

    Rng rng(kOracleTemplateSeed);
    double max_cos = 0.50;
    int attempts_at_level = 0;
    while (static_cast<int>(b.shapes.size()) < kNumBasePhones) {
      if (++attempts_at_level > 50000) {
        // Deterministic relaxation; never triggers with the pinned seed but
        // keeps construction total.
        max_cos += 0.05;
        attempts_at_level = 0;
      }
      auto cand = smooth_random(rng);
      project_out(cand, ones);
      project_out(cand, b.ramp);
      double n = norm(cand);
      if (n < 1e-6) continue;
      for (auto& x : cand) x /= n;
      bool ok = true;
      for (const auto& prev : b.shapes) {
        double dot = 0.0;
        for (int i = 0; i < kTemplateChannels; ++i) dot += cand[i] * prev[i];
        if (std::abs(dot) > max_cos) {
          ok = false;
          break;
        }
      }
      if (ok) b.shapes.push_back(cand);
    }

    double min_d2 = 1e30;
    for (size_t a = 0; a < b.shapes.size(); ++a)
      for (size_t c = a + 1; c < b.shapes.size(); ++c) {
        double d2 = 0.0;
        for (int i = 0; i < kTemplateChannels; ++i) {
          double d = b.shapes[a][i] - b.shapes[c][i];
          d2 += d * d;
        }
        min_d2 = std::min(min_d2, d2);
      }
    b.min_pairwise_dist = b.template_scale * std::sqrt(min_d2);
    if (!(b.min_pairwise_dist > 0.0)) throw TrainError("oracle template bank degenerate");
    return b;
  }();
  return bank;
}

// Envelope value for phone k at template-block channel i under formant shift
// s: the unwarped envelope is sampled at i / s, clamped at the block edges.
inline double warped_envelope(int phone, double shift, int channel) {
  const TemplateBank& b = template_bank();
  double u = std::clamp(channel / shift, 0.0, double(kTemplateChannels - 1));
  int lo = static_cast<int>(u);
  int hi = std::min(lo + 1, kTemplateChannels - 1);
  double w = u - lo;
  auto sample = [&](int idx) {
    return b.baseline[idx] + b.template_scale * b.shapes[phone][idx];
  };
  return (1.0 - w) * sample(lo) + w * sample(hi);
}

inline std::array<double, kTemplateChannels> idiosyncrasy(uint64_t seed) {
  std::array<double, kTemplateChannels> v{};
  if (seed == 0) return v;
  Rng rng(seed ^ 0x1d105eedull);
  v = smooth_random(rng);
  double n = norm(v);
  if (n < 1e-9) return std::array<double, kTemplateChannels>{};
  for (auto& x : v) x = 0.03 * x / n;
  return v;
}

}  // namespace oracle_detail

// Exposed for tests: the unwarped log-mel envelope (template block only) of a
// base phoneme, baseline included.
inline std::vector<double> oracle_phone_template(int phone) {
  if (phone < 0 || phone >= kNumBasePhones) throw InventoryError("base phone id out of range");
  std::vector<double> v(kTemplateChannels);
  for (int i = 0; i < kTemplateChannels; ++i)
    v[i] = oracle_detail::warped_envelope(phone, 1.0, i);
  return v;
}

inline double oracle_min_template_distance() {
  return oracle_detail::template_bank().min_pairwise_dist;
}

inline MelSpec oracle_synthesize(const PhoneSeq& phones, const SpeakerParams& spk) {
  if (phones.empty()) throw InventoryError("empty phone sequence");
  validate_phone_seq(phones);
  validate_speaker_params(spk);

  const int n = frames_per_phoneme(spk.rate);
  const auto idio = oracle_detail::idiosyncrasy(spk.seed);
  const double amp = oracle_detail::pitch_amplitude(spk.f0_base);

  // (base phone, tone class) per rendered phoneme
  std::vector<std::pair<int, int>> segs;
  for (size_t i = 0; i < phones.ids.size(); ++i) {
    int id = phones.ids[i];
    if (phone_is_tone(id)) continue;
    int tone = 0;
    if (i + 1 < phones.ids.size() && phone_is_tone(phones.ids[i + 1]))
      tone = phone_tone_class(phones.ids[i + 1]);
    segs.emplace_back(id, tone);
  }

  MelSpec mel(static_cast<int>(segs.size()) * n, kDefaultMelBins);
  int f = 0;
  for (auto [phone, tone] : segs) {
    for (int j = 0; j < n; ++j, ++f) {
      double t = (j + 0.5) / n;
      auto band = oracle_detail::pitch_band(oracle_detail::tone_shape(tone, t), amp);
      float* row = mel.row(f);
      for (int c = 0; c < kPitchChannels; ++c) row[c] = static_cast<float>(band[c]);
      for (int i = 0; i < kTemplateChannels; ++i) {
        double v = oracle_detail::warped_envelope(phone, spk.formant_shift, i) +
                   spk.spectral_tilt * oracle_detail::template_bank().ramp[i] + idio[i];
        row[kPitchChannels + i] = static_cast<float>(v);
      }
    }
  }
  return mel;
}

struct OracleDecodeResult {
  PhoneSeq phones;
  bool truncated = false;
  double shift_est = 1.0;
  double tilt_est = 0.0;
};

namespace oracle_detail {

// Warped envelopes on the decoder's shift grid, computed once.
struct ShiftGrid {
  std::vector<double> shifts;
  // [shift][phone][channel]
  std::vector<std::vector<std::array<double, kTemplateChannels>>> envelopes;
};

inline const ShiftGrid& shift_grid() {
  static const ShiftGrid grid = [] {
    ShiftGrid g;
    for (double s = 0.68; s <= 1.4201; s += 0.005) g.shifts.push_back(s);
    g.envelopes.resize(g.shifts.size());
    for (size_t si = 0; si < g.shifts.size(); ++si) {
      g.envelopes[si].resize(kNumBasePhones);
      for (int k = 0; k < kNumBasePhones; ++k)
        for (int i = 0; i < kTemplateChannels; ++i)
          g.envelopes[si][k][i] = warped_envelope(k, g.shifts[si], i);
    }
    return g;
  }();
  return grid;
}

}  // namespace oracle_detail

inline OracleDecodeResult oracle_decode(const MelSpec& mel, double rate_hint) {
  if (rate_hint <= 0.0) throw ConfigError("rate_hint must be positive");
  if (mel.bins != kDefaultMelBins)
    throw ShapeError("oracle_decode expects " + std::to_string(kDefaultMelBins) + " bins");
  OracleDecodeResult res;
  if (mel.frames == 0) return res;

  const int win = std::max(1, frames_per_phoneme(rate_hint));
  const int nwin = mel.frames / win;
  res.truncated = (mel.frames % win) != 0;
  if (nwin == 0) return res;

  // Window means over the template block.
  std::vector<std::array<double, kTemplateChannels>> means(nwin);
  for (int w = 0; w < nwin; ++w) {
    means[w].fill(0.0);
    for (int j = 0; j < win; ++j) {
      const float* row = mel.row(w * win + j);
      for (int i = 0; i < kTemplateChannels; ++i) means[w][i] += row[kPitchChannels + i];
    }
    for (int i = 0; i < kTemplateChannels; ++i) means[w][i] /= win;
  }

  // Joint estimate of (formant shift, tilt) with per-window phone assignment.
  const auto& grid = oracle_detail::shift_grid();
  const auto& bank = oracle_detail::template_bank();
  double best_cost = 1e300, best_shift = 1.0, best_tilt = 0.0;
  std::vector<int> best_assign(nwin, 0);

  std::vector<double> a(static_cast<size_t>(nwin) * kNumBasePhones);
  std::vector<double> bproj(static_cast<size_t>(nwin) * kNumBasePhones);
  for (size_t si = 0; si < grid.shifts.size(); ++si) {
    const auto& envs = grid.envelopes[si];
    for (int w = 0; w < nwin; ++w) {
      for (int k = 0; k < kNumBasePhones; ++k) {
        double aa = 0.0, bb = 0.0;
        for (int i = 0; i < kTemplateChannels; ++i) {
          double r = means[w][i] - envs[k][i];
          aa += r * r;
          bb += r * bank.ramp[i];
        }
        a[static_cast<size_t>(w) * kNumBasePhones + k] = aa;
        bproj[static_cast<size_t>(w) * kNumBasePhones + k] = bb;
      }
    }
    double tilt = 0.0;
    std::vector<int> assign(nwin, 0);
    double cost = 0.0;
    for (int iter = 0; iter < 3; ++iter) {
      cost = 0.0;
      double bsum = 0.0;
      for (int w = 0; w < nwin; ++w) {
        double best = 1e300;
        int bk = 0;
        for (int k = 0; k < kNumBasePhones; ++k) {
          size_t idx = static_cast<size_t>(w) * kNumBasePhones + k;
          double c = a[idx] - 2.0 * tilt * bproj[idx] + tilt * tilt;
          if (c < best) {
            best = c;
            bk = k;
          }
        }
        assign[w] = bk;
        cost += best;
        bsum += bproj[static_cast<size_t>(w) * kNumBasePhones + bk];
      }
      tilt = bsum / nwin;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_shift = grid.shifts[si];
      best_tilt = tilt;
      best_assign = assign;
    }
  }
  res.shift_est = best_shift;
  res.tilt_est = best_tilt;

  // Tone recovery from the pitch-band centroid contour.
  for (int w = 0; w < nwin; ++w) {
    res.phones.push_back(best_assign[w]);
    double best = 1e300;
    int best_tone = 0;
    for (int tone = 0; tone <= kNumTones; ++tone) {
      double d2 = 0.0;
      for (int j = 0; j < win; ++j) {
        const float* row = mel.row(w * win + j);
        std::array<double, kPitchChannels> e{};
        for (int c = 0; c < kPitchChannels; ++c) e[c] = row[c];
        double got = oracle_detail::pitch_centroid(e);
        double t = (j + 0.5) / win;
        double want = oracle_detail::measured_shape(oracle_detail::tone_shape(tone, t));
        d2 += (got - want) * (got - want);
      }
      if (d2 < best) {
        best = d2;
        best_tone = tone;
      }
    }
    if (best_tone > 0) res.phones.push_back(tone_phone_id(best_tone));
  }
  return res;
}

}  // namespace unitts
