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

#include <array>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

// Zhuyin inventory: 37 base symbols plus 5 tone tokens.
// Base ids are 0..36, tone ids 37..41 (tones 1..5).
inline constexpr int kNumBasePhones = 37;
inline constexpr int kNumTones = 5;
inline constexpr int kNumPhones = kNumBasePhones + kNumTones;

inline const std::array<const char*, kNumPhones>& phone_symbols() {
  static const std::array<const char*, kNumPhones> syms = {
      // initials
      "ㄅ", "ㄆ", "ㄇ", "ㄈ", "ㄉ", "ㄊ", "ㄋ", "ㄌ", "ㄍ", "ㄎ", "ㄏ",
      "ㄐ", "ㄑ", "ㄒ", "ㄓ", "ㄔ", "ㄕ", "ㄖ", "ㄗ", "ㄘ", "ㄙ",
      // medials
      "ㄧ", "ㄨ", "ㄩ",
      // finals
      "ㄚ", "ㄛ", "ㄜ", "ㄝ", "ㄞ", "ㄟ", "ㄠ", "ㄡ", "ㄢ", "ㄣ", "ㄤ",
      "ㄥ", "ㄦ",
      // tone marks 1..5
      "ˉ", "ˊ", "ˇ", "ˋ", "˙"};
  return syms;
}

inline bool phone_is_tone(int id) { return id >= kNumBasePhones && id < kNumPhones; }

// Tone class 1..5 for tone ids, 0 otherwise.
inline int phone_tone_class(int id) { return phone_is_tone(id) ? id - kNumBasePhones + 1 : 0; }

inline int tone_phone_id(int tone_class) { return kNumBasePhones + tone_class - 1; }

inline int phone_id(const std::string& symbol) {
  static const std::unordered_map<std::string, int> index = [] {
    std::unordered_map<std::string, int> m;
    for (int i = 0; i < kNumPhones; ++i) m.emplace(phone_symbols()[i], i);
    return m;
  }();
  auto it = index.find(symbol);
  return it == index.end() ? -1 : it->second;
}

inline const std::string& phone_symbol(int id) {
  static const std::vector<std::string> syms = [] {
    std::vector<std::string> v;
    for (auto* s : phone_symbols()) v.emplace_back(s);
    return v;
  }();
  if (id < 0 || id >= kNumPhones) throw InventoryError("phone id out of range: " + std::to_string(id));
  return syms[id];
}

// A pronunciation as an ordered list of inventory tokens. Tone tokens never
// lead the sequence and never follow another tone token.
struct PhoneSeq {
  std::vector<int> ids;

  bool empty() const { return ids.empty(); }
  size_t size() const { return ids.size(); }
  bool operator==(const PhoneSeq& o) const = default;

  void push_back(int id) { ids.push_back(id); }
  void append(const PhoneSeq& o) { ids.insert(ids.end(), o.ids.begin(), o.ids.end()); }

  size_t num_base() const {
    size_t n = 0;
    for (int id : ids)
      if (!phone_is_tone(id)) ++n;
    return n;
  }

  static PhoneSeq from_symbols(const std::vector<std::string>& symbols) {
    PhoneSeq seq;
    for (const auto& s : symbols) {
      int id = phone_id(s);
      if (id < 0) throw InventoryError("unknown phonetic symbol: " + s);
      seq.ids.push_back(id);
    }
    return seq;
  }

  // Space-separated symbol string, e.g. "ㄒ ㄧ ㄥ ˊ".
  static PhoneSeq parse(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> symbols;
    std::string tok;
    while (in >> tok) symbols.push_back(tok);
    return from_symbols(symbols);
  }

  std::string str() const {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) out += ' ';
      out += phone_symbol(ids[i]);
    }
    return out;
  }
};

inline void validate_phone_seq(const PhoneSeq& seq) {
  for (size_t i = 0; i < seq.ids.size(); ++i) {
    int id = seq.ids[i];
    if (id < 0 || id >= kNumPhones)
      throw InventoryError("phone id out of range at position " + std::to_string(i));
    if (phone_is_tone(id)) {
      if (i == 0) throw InventoryError("tone token at sequence start");
      if (phone_is_tone(seq.ids[i - 1]))
        throw InventoryError("tone token follows another tone token at position " + std::to_string(i));
    }
  }
}

}  // namespace unitts
