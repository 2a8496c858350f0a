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
#include <complex>
#include <vector>

#include "unitts/common.hpp"
#include "unitts/mel.hpp"
#include "unitts/wav.hpp"

namespace unitts {

inline constexpr int kStftWindow = 256;
inline constexpr int kStftHop = 128;
inline constexpr int kStftBins = kStftWindow / 2 + 1;  // 129

// Overall filterbank gain: maps PCM-scale spectral magnitudes into the log
// range the rest of the pipeline works in, and keeps the Griffin-Lim output
// inside [-1, 1] for pipeline-scale spectrograms.
inline constexpr double kMelGain = 0.25;

namespace dsp_detail {

inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * 3.141592653589793 / double(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        auto u = a[i + j];
        auto v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

inline const std::vector<double>& hann_window() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kStftWindow);
    for (int i = 0; i < kStftWindow; ++i)
      v[i] = 0.5 - 0.5 * std::cos(2.0 * 3.141592653589793 * i / kStftWindow);
    return v;
  }();
  return w;
}

struct MelFilterbank {
  int bins;
  int sample_rate;
  std::vector<double> weights;  // bins x kStftBins
  std::vector<double> pinv;     // kStftBins x bins, least-squares right inverse
  std::vector<double> peak_hz;  // triangle apex per mel channel

  double w(int m, int k) const { return weights[static_cast<size_t>(m) * kStftBins + k]; }
};

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Solve A x = b for symmetric positive definite A via Gauss-Jordan; A is
// n x n row-major, b is n x m, result n x m.
inline std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, int n, int m) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[size_t(r) * n + col]) > std::abs(a[size_t(piv) * n + col])) piv = r;
    if (std::abs(a[size_t(piv) * n + col]) < 1e-12) throw ShapeError("singular filterbank gram matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[size_t(piv) * n + c], a[size_t(col) * n + c]);
      for (int c = 0; c < m; ++c) std::swap(b[size_t(piv) * m + c], b[size_t(col) * m + c]);
    }
    double d = a[size_t(col) * n + col];
    for (int c = 0; c < n; ++c) a[size_t(col) * n + c] /= d;
    for (int c = 0; c < m; ++c) b[size_t(col) * m + c] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[size_t(r) * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) a[size_t(r) * n + c] -= f * a[size_t(col) * n + c];
      for (int c = 0; c < m; ++c) b[size_t(r) * m + c] -= f * b[size_t(col) * m + c];
    }
  }
  return b;
}

inline const MelFilterbank& filterbank(int bins = kDefaultMelBins,
                                       int sample_rate = kDefaultSampleRate) {
  static std::vector<MelFilterbank> cache;
  for (const auto& f : cache)
    if (f.bins == bins && f.sample_rate == sample_rate) return f;

  MelFilterbank fb;
  fb.bins = bins;
  fb.sample_rate = sample_rate;
  fb.weights.assign(static_cast<size_t>(bins) * kStftBins, 0.0);
  double mel_lo = hz_to_mel(0.0), mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(bins + 2);
  for (int i = 0; i < bins + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (bins + 1));
  fb.peak_hz.resize(bins);
  for (int m = 0; m < bins; ++m) {
    fb.peak_hz[m] = edges[m + 1];
    for (int k = 0; k < kStftBins; ++k) {
      double f = double(k) * sample_rate / kStftWindow;
      double wgt = 0.0;
      if (f >= edges[m] && f <= edges[m + 1] && edges[m + 1] > edges[m])
        wgt = (f - edges[m]) / (edges[m + 1] - edges[m]);
      else if (f > edges[m + 1] && f <= edges[m + 2] && edges[m + 2] > edges[m + 1])
        wgt = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
      fb.weights[static_cast<size_t>(m) * kStftBins + k] = wgt;
    }
  }

  // Regularized right inverse M^T (M M^T + lambda I)^-1. The low-frequency
  // triangles are narrower than an FFT bin, so the plain Gram inverse blows
  // up; the ridge keeps the linear targets bounded and a few multiplicative
  // updates in griffin_lim restore M S ~= p.
  std::vector<double> gram(static_cast<size_t>(bins) * bins, 0.0);
  double trace = 0.0;
  for (int i = 0; i < bins; ++i)
    for (int j = 0; j < bins; ++j) {
      double s = 0.0;
      for (int k = 0; k < kStftBins; ++k) s += fb.w(i, k) * fb.w(j, k);
      gram[size_t(i) * bins + j] = s;
      if (i == j) trace += s;
    }
  double lambda = 1e-3 * trace / bins;
  for (int i = 0; i < bins; ++i) gram[size_t(i) * bins + i] += lambda;
  std::vector<double> eye(static_cast<size_t>(bins) * bins, 0.0);
  for (int i = 0; i < bins; ++i) eye[size_t(i) * bins + i] = 1.0;
  auto gram_inv = solve_spd(gram, eye, bins, bins);
  fb.pinv.assign(static_cast<size_t>(kStftBins) * bins, 0.0);
  for (int k = 0; k < kStftBins; ++k)
    for (int m = 0; m < bins; ++m) {
      double s = 0.0;
      for (int j = 0; j < bins; ++j) s += fb.w(j, k) * gram_inv[size_t(j) * bins + m];
      fb.pinv[static_cast<size_t>(k) * bins + m] = s;
    }

  cache.push_back(std::move(fb));
  return cache.back();
}

// Magnitude+phase STFT, frames x kStftBins.
inline std::vector<std::vector<std::complex<double>>> stft(const std::vector<float>& x) {
  const auto& win = hann_window();
  int n = static_cast<int>(x.size());
  int frames = n < kStftWindow ? 1 : 1 + (n - kStftWindow) / kStftHop;
  std::vector<std::vector<std::complex<double>>> out(frames);
  std::vector<std::complex<double>> buf(kStftWindow);
  for (int f = 0; f < frames; ++f) {
    for (int i = 0; i < kStftWindow; ++i) {
      int idx = f * kStftHop + i;
      double v = idx < n ? x[idx] : 0.0;
      buf[i] = v * win[i];
    }
    fft_inplace(buf, false);
    out[f].assign(buf.begin(), buf.begin() + kStftBins);
  }
  return out;
}

inline std::vector<float> istft(const std::vector<std::vector<std::complex<double>>>& spec,
                                int out_len, double floor_wsum = 0.0) {
  const auto& win = hann_window();
  int frames = static_cast<int>(spec.size());
  std::vector<double> acc(static_cast<size_t>(frames - 1) * kStftHop + kStftWindow, 0.0);
  std::vector<double> wsum(acc.size(), 0.0);
  std::vector<std::complex<double>> buf(kStftWindow);
  for (int f = 0; f < frames; ++f) {
    for (int k = 0; k < kStftBins; ++k) buf[k] = spec[f][k];
    for (int k = kStftBins; k < kStftWindow; ++k) buf[k] = std::conj(spec[f][kStftWindow - k]);
    fft_inplace(buf, true);
    for (int i = 0; i < kStftWindow; ++i) {
      acc[size_t(f) * kStftHop + i] += buf[i].real() * win[i];
      wsum[size_t(f) * kStftHop + i] += win[i] * win[i];
    }
  }
  std::vector<float> out(out_len, 0.0f);
  // floor_wsum > 0 tames the vanishing window coverage at the signal edges,
  // where the exact least-squares division amplifies inconsistent content.
  // The Griffin-Lim loop needs the exact inverse (floor 0) to stay a
  // projection; only the returned waveform uses the floor.
  for (int i = 0; i < out_len && i < static_cast<int>(acc.size()); ++i)
    out[i] = static_cast<float>(acc[i] / std::max(wsum[i], floor_wsum > 0.0 ? floor_wsum : 1e-12));
  return out;
}

}  // namespace dsp_detail

// Triangle apex frequency of a mel channel, for constructing test tones.
inline double mel_channel_peak_hz(int channel, int bins = kDefaultMelBins,
                                  int sample_rate = kDefaultSampleRate) {
  return dsp_detail::filterbank(bins, sample_rate).peak_hz.at(channel);
}

inline MelSpec mel_analyze(const Waveform& w, int bins = kDefaultMelBins) {
  if (w.samples.empty()) throw ShapeError("mel_analyze: empty waveform");
  if (w.sample_rate <= 0) throw ConfigError("mel_analyze: sample_rate must be positive");
  const auto& fb = dsp_detail::filterbank(bins, w.sample_rate);
  auto spec = dsp_detail::stft(w.samples);
  MelSpec mel(static_cast<int>(spec.size()), bins);
  for (int f = 0; f < mel.frames; ++f) {
    for (int m = 0; m < bins; ++m) {
      double acc = 0.0;
      for (int k = 0; k < kStftBins; ++k) acc += fb.w(m, k) * std::abs(spec[f][k]);
      mel.at(f, m) = static_cast<float>(std::log1p(acc / kMelGain));
    }
  }
  return mel;
}

// Phase retrieval by alternating STFT-consistency and magnitude projection.
// residuals, when given, receives || |STFT(x_i)| - S ||_F / ||S||_F per
// iteration; the sequence is non-increasing.
inline Waveform griffin_lim(const MelSpec& mel, int iters, std::vector<double>* residuals = nullptr,
                            int sample_rate = kDefaultSampleRate) {
  if (iters < 1) throw ConfigError("griffin_lim: iters must be >= 1");
  Waveform w;
  w.sample_rate = sample_rate;
  if (mel.frames == 0) return w;
  const auto& fb = dsp_detail::filterbank(mel.bins, sample_rate);

  // Pseudo-invert the filterbank into a non-negative linear-magnitude
  // spectrogram; multiplicative updates pull M S back onto the mel powers.
  std::vector<std::vector<double>> target(mel.frames, std::vector<double>(kStftBins, 0.0));
  for (int f = 0; f < mel.frames; ++f) {
    std::vector<double> p(mel.bins);
    for (int m = 0; m < mel.bins; ++m) p[m] = std::expm1(double(mel.at(f, m))) * kMelGain;
    auto& s = target[f];
    for (int k = 0; k < kStftBins; ++k) {
      double acc = 0.0;
      for (int m = 0; m < mel.bins; ++m) acc += fb.pinv[static_cast<size_t>(k) * mel.bins + m] * p[m];
      s[k] = std::max(acc, 1e-8);
    }
    for (int step = 0; step < 40; ++step) {
      std::vector<double> ms(mel.bins, 0.0);
      for (int m = 0; m < mel.bins; ++m)
        for (int k = 0; k < kStftBins; ++k) ms[m] += fb.w(m, k) * s[k];
      for (int k = 0; k < kStftBins; ++k) {
        double num = 0.0, den = 0.0;
        for (int m = 0; m < mel.bins; ++m) {
          num += fb.w(m, k) * p[m];
          den += fb.w(m, k) * ms[m];
        }
        if (den > 1e-12 && num >= 0.0) s[k] *= num / den;
      }
    }
  }
  double target_norm2 = 0.0;
  for (int f = 0; f < mel.frames; ++f)
    for (int k = 0; k < kStftBins; ++k) target_norm2 += target[f][k] * target[f][k];
  double target_norm = std::sqrt(std::max(target_norm2, 1e-30));

  int out_len = (mel.frames - 1) * kStftHop + kStftWindow;
  using Spec = std::vector<std::vector<std::complex<double>>>;
  Spec c(mel.frames, std::vector<std::complex<double>>(kStftBins));
  Rng phase_rng(0x6a1f11d5);  // fixed: griffin_lim is deterministic
  for (int f = 0; f < mel.frames; ++f)
    for (int k = 0; k < kStftBins; ++k) {
      double ph = phase_rng.uniform(0.0, 6.283185307179586);
      c[f][k] = std::polar(target[f][k], ph);
    }

  auto residual_of = [&](const Spec& s) {
    double acc = 0.0;
    for (int f = 0; f < mel.frames; ++f)
      for (int k = 0; k < kStftBins; ++k) {
        double d = std::abs(s[f][k]) - target[f][k];
        acc += d * d;
      }
    return std::sqrt(acc) / target_norm;
  };
  auto mag_project = [&](const Spec& s) {
    Spec p = s;
    for (int f = 0; f < mel.frames; ++f)
      for (int k = 0; k < kStftBins; ++k) {
        double mag = std::abs(s[f][k]);
        p[f][k] = mag > 1e-12 ? s[f][k] / mag * target[f][k]
                              : std::complex<double>(target[f][k], 0.0);
      }
    return p;
  };
  auto consistent = [&](const Spec& s) { return dsp_detail::stft(dsp_detail::istft(s, out_len)); };

  // Accelerated alternating projections with a monotone safeguard: a
  // momentum step is kept only if it does not increase the residual, else
  // the plain projection step is taken, so the residual sequence is
  // non-increasing.
  const double alpha = 0.99;
  Spec s = consistent(c);
  double r = residual_of(s);
  if (residuals) residuals->push_back(r);
  Spec proj = mag_project(s);
  Spec proj_old = proj;
  for (int it = 1; it < iters; ++it) {
    Spec cand = proj;
    for (int f = 0; f < mel.frames; ++f)
      for (int k = 0; k < kStftBins; ++k)
        cand[f][k] = proj[f][k] + alpha * (proj[f][k] - proj_old[f][k]);
    Spec s2 = consistent(cand);
    double r2 = residual_of(s2);
    if (r2 > r) {
      s2 = consistent(proj);
      r2 = residual_of(s2);
    }
    if (residuals) residuals->push_back(r2);
    proj_old = proj;
    proj = mag_project(s2);
    r = r2;
  }
  w.samples = dsp_detail::istft(proj, out_len, 0.1);
  w.clamp();
  return w;
}

}  // namespace unitts
