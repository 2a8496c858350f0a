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

#include <string>
#include <vector>

#include "unitts/common.hpp"
#include "unitts/g2p.hpp"
#include "unitts/phones.hpp"
#include "unitts/syllable.hpp"

namespace unitts {

struct AugmentPolicy {
  double p_sentence = 0.5;
  double p_char = 0.3;
  double p_noise_drop = 0.05;
  double p_noise_swap = 0.10;
  uint64_t seed = 0;
};

inline void validate_policy(const AugmentPolicy& p) {
  for (double v : {p.p_sentence, p.p_char, p.p_noise_drop, p.p_noise_swap})
    if (v < 0.0 || v > 1.0) throw ConfigError("augment probability out of [0, 1]");
  if (p.p_noise_drop + p.p_noise_swap > 1.0)
    throw ConfigError("p_noise_drop + p_noise_swap must be <= 1");
}

enum class NoiseTag { kClean, kDropped, kSwapped };

struct PhonGroup {
  int char_index = 0;
  PhoneSeq phones;  // the symbols as attached (post-noise)
  NoiseTag tag = NoiseTag::kClean;
  bool present = true;  // dropped groups stay in the log but not in tokens
};

// Character stream with attached phonetic-symbol groups. Every present group
// immediately follows its source character when serialized.
struct AugmentedText {
  std::vector<char32_t> chars;
  std::vector<PhonGroup> groups;  // ordered by char_index, at most one per char

  const PhonGroup* group_at(int char_index) const {
    for (const auto& g : groups)
      if (g.char_index == char_index) return &g;
    return nullptr;
  }

  // `字[ㄗˋ]` form; dropped groups are omitted.
  std::string serialize() const {
    std::string out;
    for (size_t i = 0; i < chars.size(); ++i) {
      utf8_append(out, chars[i]);
      const PhonGroup* g = group_at(static_cast<int>(i));
      if (g && g->present) {
        out += '[';
        for (int id : g->phones.ids) out += phone_symbol(id);
        out += ']';
      }
    }
    return out;
  }

  static AugmentedText parse(const std::string& text) {
    AugmentedText out;
    auto cps = utf8_decode(text);
    size_t i = 0;
    while (i < cps.size()) {
      if (cps[i] == U'[') {
        if (out.chars.empty()) throw FormatError("phonetic group with no preceding character");
        PhonGroup g;
        g.char_index = static_cast<int>(out.chars.size()) - 1;
        if (out.group_at(g.char_index)) throw FormatError("two phonetic groups on one character");
        ++i;
        while (i < cps.size() && cps[i] != U']') {
          int id = phone_id(utf8_encode(cps[i]));
          if (id < 0) throw InventoryError("invalid symbol in phonetic group: " + utf8_encode(cps[i]));
          g.phones.push_back(id);
          ++i;
        }
        if (i >= cps.size()) throw FormatError("unterminated phonetic group");
        ++i;  // skip ']'
        validate_phone_seq(g.phones);
        out.groups.push_back(std::move(g));
      } else {
        out.chars.push_back(cps[i]);
        ++i;
      }
    }
    return out;
  }
};

// Sentence- and character-level augmentation tree with controlled noising.
// Swaps consult the dictionary for polyphone alternatives; monophones swap to
// a random grammar syllable.
inline AugmentedText augment_text(const AnnotatedText& annotated, const PronDict& dict,
                                  const AugmentPolicy& policy, Rng& rng) {
  validate_policy(policy);
  AugmentedText out;
  for (const auto& c : annotated.chars) out.chars.push_back(c.ch);

  if (!rng.bernoulli(policy.p_sentence)) return out;

  for (size_t i = 0; i < annotated.chars.size(); ++i) {
    const auto& c = annotated.chars[i];
    if (c.punctuation || c.pron.empty()) continue;
    if (!rng.bernoulli(policy.p_char)) continue;
    PhonGroup g;
    g.char_index = static_cast<int>(i);
    g.phones = c.pron;
    double u = rng.uniform();
    if (u < policy.p_noise_drop) {
      g.tag = NoiseTag::kDropped;
      g.present = false;
    } else if (u < policy.p_noise_drop + policy.p_noise_swap) {
      g.tag = NoiseTag::kSwapped;
      if (c.polyphone && dict.candidates(c.ch).size() > 1) {
        const auto& cands = dict.candidates(c.ch);
        size_t pick = rng.uniform_index(cands.size() - 1);
        if (static_cast<int>(pick) >= c.candidate) ++pick;
        g.phones = cands[pick];
      } else {
        g.phones = syllable::sample_other(rng, c.pron);
      }
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

// Pronunciation actually rendered to audio: swapped symbols replace the
// annotated reading, dropped attachments leave it unchanged.
inline PhoneSeq render_augmented_targets(const AnnotatedText& annotated, const AugmentedText& aug) {
  if (annotated.chars.size() != aug.chars.size())
    throw ShapeError("augmented text does not align with annotation");
  for (size_t i = 0; i < annotated.chars.size(); ++i)
    if (annotated.chars[i].ch != aug.chars[i])
      throw ShapeError("augmented text character mismatch at position " + std::to_string(i));
  for (const auto& g : aug.groups)
    if (g.char_index < 0 || g.char_index >= static_cast<int>(aug.chars.size()))
      throw ShapeError("phonetic group index out of range");

  PhoneSeq target;
  for (size_t i = 0; i < annotated.chars.size(); ++i) {
    const auto& c = annotated.chars[i];
    if (c.punctuation) continue;
    const PhonGroup* g = aug.group_at(static_cast<int>(i));
    if (g && g->tag == NoiseTag::kSwapped)
      target.append(g->phones);
    else
      target.append(c.pron);
  }
  return target;
}

}  // namespace unitts
