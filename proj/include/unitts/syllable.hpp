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
#include "unitts/phones.hpp"

namespace unitts {

// Syllable grammar of the desk corpus: (initial?)(medial?) final tone. The
// sub-inventory is sized so that the default 64-entry unit codebook can give
// every (phoneme, tone) state its own cluster.
namespace syllable {

inline const std::vector<std::string>& initials() {
  static const std::vector<std::string> v = {"ㄅ", "ㄇ", "ㄉ", "ㄌ", "ㄍ", "ㄏ", "ㄒ", "ㄓ"};
  return v;
}
inline const std::vector<std::string>& medials() {
  static const std::vector<std::string> v = {"ㄧ", "ㄨ"};
  return v;
}
inline const std::vector<std::string>& finals() {
  static const std::vector<std::string> v = {"ㄚ", "ㄜ", "ㄞ", "ㄠ", "ㄢ", "ㄤ", "ㄥ"};
  return v;
}

inline bool in_set(const std::vector<std::string>& set, int phone) {
  for (const auto& s : set)
    if (phone_id(s) == phone) return true;
  return false;
}

// A single syllable: optional initial, optional medial, final, tone.
inline bool valid(const PhoneSeq& s) {
  size_t n = s.size();
  if (n < 2 || n > 4) return false;
  if (!phone_is_tone(s.ids[n - 1])) return false;
  size_t i = 0;
  if (in_set(initials(), s.ids[i])) ++i;
  if (i < n - 1 && in_set(medials(), s.ids[i])) ++i;
  if (i != n - 2) return false;
  return in_set(finals(), s.ids[i]);
}

inline PhoneSeq sample(Rng& rng) {
  PhoneSeq s;
  if (rng.bernoulli(0.8))
    s.push_back(phone_id(initials()[rng.uniform_index(initials().size())]));
  if (rng.bernoulli(0.4))
    s.push_back(phone_id(medials()[rng.uniform_index(medials().size())]));
  s.push_back(phone_id(finals()[rng.uniform_index(finals().size())]));
  s.push_back(tone_phone_id(1 + static_cast<int>(rng.uniform_index(kNumTones))));
  return s;
}

// Uniform sample different from `avoid`.
inline PhoneSeq sample_other(Rng& rng, const PhoneSeq& avoid) {
  for (int guard = 0; guard < 1000; ++guard) {
    PhoneSeq s = sample(rng);
    if (!(s == avoid)) return s;
  }
  throw TrainError("syllable sampler failed to find an alternative");
}

}  // namespace syllable

}  // namespace unitts
