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

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>

#include "unitts/dsp.hpp"
#include "unitts/oracle.hpp"
#include "unitts/wav.hpp"

using namespace unitts;

TEST_CASE("silence analyzes to an all-zero mel", "[dsp]") {
  Waveform w;
  w.samples.assign(4000, 0.0f);
  auto mel = mel_analyze(w);
  CHECK(mel.bins == kDefaultMelBins);
  CHECK(mel.frames == 1 + (4000 - kStftWindow) / kStftHop);
  for (float v : mel.values) CHECK(v == 0.0f);
}

TEST_CASE("a short waveform yields a single zero-padded frame", "[dsp]") {
  Waveform w;
  w.samples.assign(100, 0.1f);
  auto mel = mel_analyze(w);
  CHECK(mel.frames == 1);
  CHECK_THROWS_AS(mel_analyze(Waveform{}), ShapeError);
}

TEST_CASE("a sinusoid at a channel peak concentrates in that channel", "[dsp]") {
  const int channel = 20;
  double f_peak = mel_channel_peak_hz(channel);
  // Snap to the nearest FFT bin center to minimize leakage.
  double bin_hz = double(kDefaultSampleRate) / kStftWindow;
  double f = std::round(f_peak / bin_hz) * bin_hz;
  Waveform w;
  w.samples.resize(8000);
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = static_cast<float>(0.5 * std::sin(2.0 * 3.141592653589793 * f * i / kDefaultSampleRate));
  auto mel = mel_analyze(w);
  for (int fr = 1; fr + 1 < mel.frames; ++fr) {
    int argmax = 0;
    for (int b = 1; b < mel.bins; ++b)
      if (mel.at(fr, b) > mel.at(fr, argmax)) argmax = b;
    CHECK(argmax == channel);
  }
}

TEST_CASE("griffin_lim of a zero mel is a zero waveform", "[dsp]") {
  MelSpec zero(12, kDefaultMelBins);
  auto w = griffin_lim(zero, 5);
  REQUIRE_FALSE(w.samples.empty());
  for (float v : w.samples) CHECK(std::abs(v) < 1e-9f);
  CHECK_THROWS_AS(griffin_lim(zero, 0), ConfigError);
}

TEST_CASE("griffin_lim residual is non-increasing", "[dsp]") {
  SpeakerParams spk;
  auto mel = oracle_synthesize(PhoneSeq::parse("ㄇ ㄚ ˉ ㄌ ㄧ ˇ ㄍ ㄨ ˋ"), spk);
  std::vector<double> res;
  griffin_lim(mel, 60, &res);
  REQUIRE(res.size() == 60);
  for (size_t i = 1; i < res.size(); ++i) CHECK(res[i] <= res[i - 1] + 1e-9);
  CHECK(res[59] <= res[0]);
}

TEST_CASE("mel round-trips through griffin_lim within tolerance", "[dsp][slow]") {
  // Tolerances frozen from a 12-utterance sweep at 60 iterations.
  Rng rng(42);
  double sum_mae = 0.0, worst = 0.0;
  const int utterances = 12;
  for (int u = 0; u < utterances; ++u) {
    PhoneSeq p;
    int nb = 2 + static_cast<int>(rng.uniform_index(8));
    for (int i = 0; i < nb; ++i) {
      p.push_back(static_cast<int>(rng.uniform_index(kNumBasePhones)));
      if (rng.bernoulli(0.5)) p.push_back(tone_phone_id(1 + static_cast<int>(rng.uniform_index(5))));
    }
    SpeakerParams s;
    s.f0_base = rng.uniform(60, 400);
    s.formant_shift = rng.uniform(0.7, 1.4);
    s.spectral_tilt = rng.uniform(-0.6, 0.6);
    s.rate = rng.uniform(0.5, 2.0);
    s.seed = rng.next_u64();
    auto mel = oracle_synthesize(p, s);
    auto back = mel_analyze(griffin_lim(mel, 60));
    REQUIRE(back.frames == mel.frames);
    double mae = mel_mean_abs_diff(back, mel);
    sum_mae += mae;
    worst = std::max(worst, mae);
  }
  CHECK(sum_mae / utterances <= 0.1);
  CHECK(worst <= 0.2);
}

TEST_CASE("wav files round-trip at PCM16 precision", "[dsp]") {
  Waveform w;
  w.sample_rate = 8000;
  Rng rng(7);
  w.samples.resize(1000);
  for (auto& s : w.samples) s = static_cast<float>(rng.uniform(-1.0, 1.0));
  auto path = std::filesystem::temp_directory_path() / "unitts_test.wav";
  save_wav(w, path.string());
  auto back = load_wav(path.string());
  REQUIRE(back.samples.size() == w.samples.size());
  CHECK(back.sample_rate == 8000);
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.0f / 32766.0f);
  std::filesystem::remove(path);
}

TEST_CASE("mel fixture files round-trip bitwise", "[dsp]") {
  MelSpec mel(3, 5);
  for (size_t i = 0; i < mel.values.size(); ++i) mel.values[i] = static_cast<float>(i) * 0.25f - 1.0f;
  auto path = std::filesystem::temp_directory_path() / "unitts_test.melb";
  save_mel(mel, path.string());
  auto back = load_mel(path.string());
  CHECK(back == mel);
  CHECK_THROWS_AS(load_mel("/nonexistent/file.melb"), FormatError);
  std::filesystem::remove(path);
}
