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

#include "unitts/metrics.hpp"
#include "unitts/oracle.hpp"

using namespace unitts;

namespace {

PhoneSeq random_phone_seq(Rng& rng, int min_base = 2, int max_base = 12) {
  PhoneSeq seq;
  int n = min_base + static_cast<int>(rng.uniform_index(max_base - min_base + 1));
  for (int i = 0; i < n; ++i) {
    seq.push_back(static_cast<int>(rng.uniform_index(kNumBasePhones)));
    if (rng.bernoulli(0.5))
      seq.push_back(tone_phone_id(1 + static_cast<int>(rng.uniform_index(kNumTones))));
  }
  return seq;
}

SpeakerParams random_speaker(Rng& rng) {
  SpeakerParams p;
  p.f0_base = rng.uniform(60.0, 400.0);
  p.formant_shift = rng.uniform(0.7, 1.4);
  p.spectral_tilt = rng.uniform(-0.6, 0.6);
  p.rate = rng.uniform(0.5, 2.0);
  p.seed = rng.next_u64();
  return p;
}

}  // namespace

TEST_CASE("synthesize frame counts follow the frames-per-phoneme rule", "[oracle]") {
  SpeakerParams spk;
  auto phones = PhoneSeq::from_symbols({"ㄇ", "ㄚ", "ˉ"});
  auto mel = oracle_synthesize(phones, spk);
  CHECK(mel.frames == 8);  // 2 base phonemes x 4 frames
  CHECK(mel.bins == kDefaultMelBins);

  SECTION("frame count equals sum over base phonemes at other rates") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      auto p = random_phone_seq(rng);
      auto s = random_speaker(rng);
      auto m = oracle_synthesize(p, s);
      CHECK(m.frames == static_cast<int>(p.num_base()) * frames_per_phoneme(s.rate));
      CHECK(m.all_finite());
    }
  }
}

TEST_CASE("synthesize is deterministic", "[oracle]") {
  Rng rng(22);
  auto phones = random_phone_seq(rng);
  auto spk = random_speaker(rng);
  auto a = oracle_synthesize(phones, spk);
  auto b = oracle_synthesize(phones, spk);
  CHECK(a == b);
}

TEST_CASE("rejects invalid input", "[oracle]") {
  SpeakerParams spk;
  CHECK_THROWS_AS(oracle_synthesize(PhoneSeq{}, spk), InventoryError);
  CHECK_THROWS_AS(PhoneSeq::from_symbols({"Q"}), InventoryError);
  // tone first / doubled tone violate the sequence invariant
  PhoneSeq bad;
  bad.push_back(tone_phone_id(1));
  CHECK_THROWS_AS(oracle_synthesize(bad, spk), InventoryError);
  PhoneSeq bad2 = PhoneSeq::from_symbols({"ㄚ", "ˊ"});
  bad2.push_back(tone_phone_id(2));
  CHECK_THROWS_AS(oracle_synthesize(bad2, spk), InventoryError);
}

TEST_CASE("formant shift separates speakers", "[oracle]") {
  auto phones = PhoneSeq::from_symbols({"ㄇ", "ㄚ", "ˉ", "ㄌ", "ㄧ", "ˇ"});
  SpeakerParams a, b;
  a.formant_shift = 0.8;
  b.formant_shift = 1.3;
  auto ma = oracle_synthesize(phones, a);
  auto mb = oracle_synthesize(phones, b);
  REQUIRE(ma.frames == mb.frames);
  for (int f = 0; f < ma.frames; ++f) {
    double d2 = 0.0;
    for (int c = 0; c < ma.bins; ++c) {
      double d = double(ma.at(f, c)) - double(mb.at(f, c));
      d2 += d * d;
    }
    CHECK(std::sqrt(d2) > 0.1);
  }
}

TEST_CASE("templates are pairwise separated", "[oracle]") {
  CHECK(oracle_min_template_distance() > 0.3);
  for (int k = 0; k < kNumBasePhones; ++k) {
    auto t = oracle_phone_template(k);
    REQUIRE(t.size() == size_t(kTemplateChannels));
    for (double v : t) CHECK(v > 0.0);
  }
}

TEST_CASE("decode round-trips synthesize exactly on a 200-utterance suite", "[oracle][roundtrip]") {
  Rng rng(314159);
  int utterances = 200;
  size_t errors = 0, total = 0;
  for (int u = 0; u < utterances; ++u) {
    auto phones = random_phone_seq(rng);
    auto spk = random_speaker(rng);
    auto mel = oracle_synthesize(phones, spk);
    auto dec = oracle_decode(mel, spk.rate);
    CHECK_FALSE(dec.truncated);
    total += phones.size();
    errors += levenshtein(phones.ids, dec.phones.ids);
    if (dec.phones != phones && errors < 30) {
      INFO("utterance " << u << "\nref: " << phones.str() << "\nhyp: " << dec.phones.str()
                        << "\nshift " << spk.formant_shift << " est " << dec.shift_est
                        << " tilt " << spk.spectral_tilt << " est " << dec.tilt_est);
      CHECK(dec.phones == phones);
    }
  }
  CHECK(errors == 0);
  CHECK(total > 0);
}

TEST_CASE("decode handles empty and truncated input", "[oracle]") {
  auto dec = oracle_decode(MelSpec(0, kDefaultMelBins), 1.0);
  CHECK(dec.phones.empty());
  CHECK_FALSE(dec.truncated);

  SpeakerParams spk;
  auto mel = oracle_synthesize(PhoneSeq::from_symbols({"ㄅ", "ㄚ", "ˋ"}), spk);
  mel.frames -= 1;
  mel.values.resize(size_t(mel.frames) * mel.bins);
  auto dec2 = oracle_decode(mel, spk.rate);
  CHECK(dec2.truncated);
  CHECK(dec2.phones.num_base() == 1);  // floor(7 / 4)
}

TEST_CASE("decode tolerates additive noise", "[oracle]") {
  Rng rng(777);
  Rng noise_rng(778);
  const double sigma = 0.01;
  size_t errors = 0, total = 0;
  for (int u = 0; u < 200; ++u) {
    auto phones = random_phone_seq(rng);
    auto spk = random_speaker(rng);
    auto mel = oracle_synthesize(phones, spk);
    for (auto& v : mel.values) v += static_cast<float>(sigma * noise_rng.normal());
    auto dec = oracle_decode(mel, spk.rate);
    total += phones.size();
    errors += levenshtein(phones.ids, dec.phones.ids);
  }
  CAPTURE(errors, total);
  CHECK(double(errors) <= 0.01 * double(total));
}
