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

#include "unitts/oracle.hpp"
#include "unitts/speaker.hpp"

using namespace unitts;

namespace {
PhoneSeq random_utterance(Rng& rng) {
  PhoneSeq p;
  int nb = 3 + static_cast<int>(rng.uniform_index(8));
  for (int i = 0; i < nb; ++i) {
    p.push_back(static_cast<int>(rng.uniform_index(kNumBasePhones)));
    if (rng.bernoulli(0.5)) p.push_back(tone_phone_id(1 + static_cast<int>(rng.uniform_index(5))));
  }
  return p;
}
}  // namespace

TEST_CASE("embeddings are unit norm and deterministic", "[speaker]") {
  SpeakerParams spk;
  auto mel = oracle_synthesize(PhoneSeq::parse("ㄇ ㄚ ˉ ㄋ ㄧ ˊ"), spk);
  auto a = extract_speaker_embedding(mel);
  auto b = extract_speaker_embedding(mel);
  CHECK(a == b);
  double n2 = 0.0;
  for (float v : a.vector) n2 += double(v) * v;
  CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-6);
  CHECK(speaker_similarity(a, a) == Catch::Approx(1.0));

  SECTION("single-frame mel works with std = 0") {
    MelSpec one(1, kDefaultMelBins);
    for (int b2 = 0; b2 < one.bins; ++b2) one.at(0, b2) = 0.5f;
    auto e = extract_speaker_embedding(one);
    double n = 0.0;
    for (float v : e.vector) n += double(v) * v;
    CHECK(std::abs(std::sqrt(n) - 1.0) <= 1e-6);
  }
  SECTION("empty mel rejected") {
    CHECK_THROWS_AS(extract_speaker_embedding(MelSpec(0, kDefaultMelBins)), ShapeError);
  }
}

TEST_CASE("similarity demands unit-norm inputs and is symmetric", "[speaker]") {
  SpeakerEmbedding a, b;
  a.vector.assign(kSpeakerEmbeddingDim, 0.0f);
  b.vector.assign(kSpeakerEmbeddingDim, 0.0f);
  a.vector[0] = 1.0f;
  b.vector[1] = 1.0f;
  CHECK(speaker_similarity(a, b) == 0.0);
  SpeakerEmbedding bad;
  bad.vector.assign(kSpeakerEmbeddingDim, 0.5f);
  CHECK_THROWS_AS(speaker_similarity(a, bad), ShapeError);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    SpeakerEmbedding x, y;
    x.vector.resize(kSpeakerEmbeddingDim);
    y.vector.resize(kSpeakerEmbeddingDim);
    double nx = 0, ny = 0;
    for (int i = 0; i < kSpeakerEmbeddingDim; ++i) {
      x.vector[i] = static_cast<float>(rng.normal());
      y.vector[i] = static_cast<float>(rng.normal());
      nx += double(x.vector[i]) * x.vector[i];
      ny += double(y.vector[i]) * y.vector[i];
    }
    for (int i = 0; i < kSpeakerEmbeddingDim; ++i) {
      x.vector[i] = static_cast<float>(x.vector[i] / std::sqrt(nx));
      y.vector[i] = static_cast<float>(y.vector[i] / std::sqrt(ny));
    }
    CHECK(speaker_similarity(x, y) == Catch::Approx(speaker_similarity(y, x)));
    CHECK(speaker_similarity(x, y) >= -1.0 - 1e-9);
    CHECK(speaker_similarity(x, y) <= 1.0 + 1e-9);
  }
}

TEST_CASE("same-speaker utterances are closer than formant-shifted speakers", "[speaker]") {
  // 20-speaker suite; cross pairs differ by >= 0.3 in formant shift.
  Rng rng(2024);
  std::vector<SpeakerParams> spks(20);
  std::vector<SpeakerEmbedding> emb1, emb2;
  for (auto& s : spks) {
    s.f0_base = rng.uniform(80, 350);
    s.formant_shift = rng.uniform(0.7, 1.4);
    s.spectral_tilt = rng.uniform(-0.5, 0.5);
    s.rate = rng.uniform(0.8, 1.2);
    s.seed = rng.next_u64();
    emb1.push_back(extract_speaker_embedding(oracle_synthesize(random_utterance(rng), s)));
    emb2.push_back(extract_speaker_embedding(oracle_synthesize(random_utterance(rng), s)));
  }
  double same_sum = 0.0;
  for (size_t i = 0; i < spks.size(); ++i) same_sum += speaker_similarity(emb1[i], emb2[i]);
  double same_mean = same_sum / spks.size();

  double cross_sum = 0.0;
  int cross_n = 0;
  for (size_t i = 0; i < spks.size(); ++i)
    for (size_t j = i + 1; j < spks.size(); ++j)
      if (std::abs(spks[i].formant_shift - spks[j].formant_shift) >= 0.3) {
        cross_sum += speaker_similarity(emb1[i], emb2[j]);
        ++cross_n;
      }
  REQUIRE(cross_n > 0);
  double cross_mean = cross_sum / cross_n;
  CAPTURE(same_mean, cross_mean);
  CHECK(same_mean >= cross_mean);
}
