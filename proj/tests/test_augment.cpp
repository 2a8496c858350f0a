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

#include "unitts/augment.hpp"

using namespace unitts;

namespace {

const PronDict& dict() {
  static const PronDict d = PronDict::load(std::string(UNITTS_DATA_DIR) + "/prondict.tsv");
  return d;
}

AnnotatedText annotate(const std::string& text) {
  AnnotatedText t;
  for (char32_t cp : utf8_decode(text)) {
    AnnotatedChar c;
    c.ch = cp;
    if (is_punctuation(cp)) {
      c.punctuation = true;
    } else {
      c.polyphone = dict().is_polyphone(cp);
      c.pron = dict().candidates(cp)[0];
    }
    t.chars.push_back(c);
  }
  return t;
}

std::string sample_text(Rng& rng, int n) {
  std::string s;
  const auto& chars = dict().chars();
  for (int i = 0; i < n; ++i) s += utf8_encode(chars[rng.uniform_index(chars.size())]);
  return s;
}

}  // namespace

TEST_CASE("closed sentence gate returns plain characters", "[augment]") {
  auto t = annotate("我們學校");
  AugmentPolicy p;
  p.p_sentence = 0.0;
  Rng rng(1);
  auto aug = augment_text(t, dict(), p, rng);
  CHECK(aug.groups.empty());
  CHECK(aug.serialize() == "我們學校");
}

TEST_CASE("forced tree path attaches every pronunciation", "[augment]") {
  auto t = annotate("我們學校");
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 1.0;
  p.p_noise_drop = 0.0;
  p.p_noise_swap = 0.0;
  Rng rng(2);
  auto aug = augment_text(t, dict(), p, rng);
  REQUIRE(aug.groups.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(aug.groups[i].char_index == static_cast<int>(i));
    CHECK(aug.groups[i].tag == NoiseTag::kClean);
    CHECK(aug.groups[i].phones == t.chars[i].pron);
  }
  // serialization round-trip preserves tokens
  auto parsed = AugmentedText::parse(aug.serialize());
  CHECK(parsed.chars == aug.chars);
  REQUIRE(parsed.groups.size() == aug.groups.size());
  for (size_t i = 0; i < parsed.groups.size(); ++i) {
    CHECK(parsed.groups[i].char_index == aug.groups[i].char_index);
    CHECK(parsed.groups[i].phones == aug.groups[i].phones);
  }
}

TEST_CASE("punctuation is never augmented", "[augment]") {
  auto t = annotate("我們，學校。");
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 1.0;
  Rng rng(3);
  auto aug = augment_text(t, dict(), p, rng);
  for (const auto& g : aug.groups) CHECK_FALSE(t.chars[g.char_index].punctuation);
  CHECK(aug.groups.size() == 4);
}

TEST_CASE("attachment rate matches p_char over a large corpus", "[augment]") {
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 0.3;
  p.p_noise_drop = 0.0;
  p.p_noise_swap = 0.0;
  Rng text_rng(11);
  Rng rng(12);
  size_t chars = 0, attached = 0;
  while (chars < 10000) {
    auto t = annotate(sample_text(text_rng, 20));
    auto aug = augment_text(t, dict(), p, rng);
    chars += t.chars.size();
    attached += aug.groups.size();
  }
  double rate = double(attached) / double(chars);
  CHECK(rate == Catch::Approx(0.3).margin(0.02));
}

TEST_CASE("sentence gate rate stays within 3 binomial sigmas", "[augment]") {
  AugmentPolicy p;
  p.p_sentence = 0.5;
  p.p_char = 1.0;
  Rng text_rng(21);
  Rng rng(22);
  int open = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    auto t = annotate(sample_text(text_rng, 5));
    auto aug = augment_text(t, dict(), p, rng);
    if (!aug.groups.empty()) ++open;
  }
  double sigma = std::sqrt(0.5 * 0.5 / n);
  CHECK(std::abs(double(open) / n - 0.5) <= 3.0 * sigma);
}

TEST_CASE("augmentation is bit-reproducible given equal seeds", "[augment]") {
  Rng text_rng(31);
  auto t = annotate(sample_text(text_rng, 30));
  AugmentPolicy p;
  p.p_noise_drop = 0.2;
  p.p_noise_swap = 0.3;
  Rng r1(77), r2(77);
  auto a = augment_text(t, dict(), p, r1);
  auto b = augment_text(t, dict(), p, r2);
  CHECK(a.serialize() == b.serialize());
  REQUIRE(a.groups.size() == b.groups.size());
  for (size_t i = 0; i < a.groups.size(); ++i) {
    CHECK(a.groups[i].tag == b.groups[i].tag);
    CHECK(a.groups[i].phones == b.groups[i].phones);
  }
}

TEST_CASE("noise tags partition groups; dropped stay in the log only", "[augment]") {
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 1.0;
  p.p_noise_drop = 0.5;
  p.p_noise_swap = 0.5;
  Rng text_rng(41);
  Rng rng(42);
  auto t = annotate(sample_text(text_rng, 200));
  auto aug = augment_text(t, dict(), p, rng);
  size_t dropped = 0, swapped = 0, clean = 0;
  for (const auto& g : aug.groups) {
    switch (g.tag) {
      case NoiseTag::kDropped:
        ++dropped;
        CHECK_FALSE(g.present);
        break;
      case NoiseTag::kSwapped:
        ++swapped;
        CHECK(g.present);
        CHECK(syllable::valid(g.phones));
        CHECK_FALSE(g.phones == t.chars[g.char_index].pron);
        break;
      case NoiseTag::kClean:
        ++clean;
        break;
    }
  }
  CHECK(dropped + swapped + clean == aug.groups.size());
  CHECK(dropped > 0);
  CHECK(swapped > 0);
  CHECK(clean == 0);  // p_drop + p_swap = 1 leaves no clean path
  // dropped groups do not serialize
  auto parsed = AugmentedText::parse(aug.serialize());
  CHECK(parsed.groups.size() == aug.groups.size() - dropped);
}

TEST_CASE("stripping groups recovers the original characters", "[augment]") {
  Rng text_rng(51);
  Rng rng(52);
  AugmentPolicy p;
  p.p_noise_drop = 0.1;
  p.p_noise_swap = 0.2;
  for (int trial = 0; trial < 20; ++trial) {
    std::string text = sample_text(text_rng, 15);
    auto t = annotate(text);
    auto aug = augment_text(t, dict(), p, rng);
    auto parsed = AugmentedText::parse(aug.serialize());
    std::string plain;
    for (char32_t c : parsed.chars) utf8_append(plain, c);
    CHECK(plain == text);
  }
}

TEST_CASE("render targets follow swapped symbols and keep dropped readings", "[augment]") {
  auto t = annotate("我們學校大");
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 1.0;
  p.p_noise_drop = 0.0;
  p.p_noise_swap = 0.0;
  Rng rng(61);
  auto aug = augment_text(t, dict(), p, rng);

  SECTION("all clean: target equals the annotated sequence") {
    CHECK(render_augmented_targets(t, aug) == t.phones());
  }
  SECTION("one swapped group changes exactly that syllable") {
    aug.groups[2].tag = NoiseTag::kSwapped;
    aug.groups[2].phones = syllable::sample_other(rng, t.chars[2].pron);
    auto target = render_augmented_targets(t, aug);
    PhoneSeq expect;
    for (size_t i = 0; i < t.chars.size(); ++i)
      expect.append(i == 2 ? aug.groups[2].phones : t.chars[i].pron);
    CHECK(target == expect);
    CHECK_FALSE(target == t.phones());
  }
  SECTION("dropped group leaves the annotated reading") {
    aug.groups[1].tag = NoiseTag::kDropped;
    aug.groups[1].present = false;
    CHECK(render_augmented_targets(t, aug) == t.phones());
  }
  SECTION("misaligned inputs raise an alignment error") {
    auto other = annotate("我們學");
    CHECK_THROWS_AS(render_augmented_targets(other, aug), ShapeError);
  }
}

TEST_CASE("corpus-level swap fraction equals the observed swap count", "[augment]") {
  AugmentPolicy p;
  p.p_sentence = 1.0;
  p.p_char = 0.5;
  p.p_noise_drop = 0.05;
  p.p_noise_swap = 0.10;
  Rng text_rng(71);
  Rng rng(72);
  size_t changed = 0, swapped = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto t = annotate(sample_text(text_rng, 12));
    auto aug = augment_text(t, dict(), p, rng);
    for (const auto& g : aug.groups)
      if (g.tag == NoiseTag::kSwapped) ++swapped;
    auto target = render_augmented_targets(t, aug);
    // count characters whose rendered syllable differs from the annotation
    size_t pos_t = 0, pos_r = 0;
    for (const auto& c : t.chars) {
      if (c.punctuation) continue;
      const PhonGroup* g = aug.group_at(static_cast<int>(&c - t.chars.data()));
      PhoneSeq rendered;
      for (size_t k = 0; k < (g && g->tag == NoiseTag::kSwapped ? g->phones.size() : c.pron.size()); ++k)
        rendered.push_back(target.ids[pos_r + k]);
      if (!(rendered == c.pron)) ++changed;
      pos_r += rendered.size();
      pos_t += c.pron.size();
    }
  }
  CHECK(changed == swapped);
}
