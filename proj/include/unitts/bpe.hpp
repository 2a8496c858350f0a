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
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "unitts/common.hpp"
#include "unitts/phones.hpp"

namespace unitts {

// Special token slots shared with the unit LM.
enum SpecialToken : int {
  kTokBos = 0,
  kTokSepText = 1,
  kTokSepUnit = 2,
  kTokEosText = 3,
  kTokSpk = 4,
  kNumSpecialTokens = 5,
};

// Byte-pair vocabulary over codepoints. Phonetic symbols, tone marks, group
// brackets and whitespace are atomic: they are seeded into the alphabet and
// never participate in merges.
class BpeVocab {
 public:
  using Sym = std::u32string;

  static std::set<char32_t> atomic_codepoints() {
    std::set<char32_t> s;
    for (int i = 0; i < kNumPhones; ++i) {
      auto cps = utf8_decode(phone_symbol(i));
      s.insert(cps.at(0));
    }
    s.insert(U'[');
    s.insert(U']');
    s.insert(U' ');
    s.insert(U'\t');
    s.insert(U'\n');
    return s;
  }

  static BpeVocab train(const std::vector<std::string>& corpus, size_t vocab_size) {
    BpeVocab v;
    v.init_alphabet(corpus);
    if (vocab_size < v.size())
      throw ConfigError("vocab_size " + std::to_string(vocab_size) + " below base alphabet " +
                        std::to_string(v.size()));

    std::vector<std::vector<Sym>> seqs;
    seqs.reserve(corpus.size());
    for (const auto& s : corpus) {
      std::vector<Sym> t;
      for (char32_t cp : utf8_decode(s)) t.push_back(Sym(1, cp));
      seqs.push_back(std::move(t));
    }

    const auto atomic = atomic_codepoints();
    auto mergeable = [&](const Sym& s) {
      return !(s.size() == 1 && atomic.count(s[0]));
    };

    while (v.size() < vocab_size) {
      std::map<std::pair<Sym, Sym>, size_t> counts;
      for (const auto& seq : seqs)
        for (size_t i = 0; i + 1 < seq.size(); ++i)
          if (mergeable(seq[i]) && mergeable(seq[i + 1])) ++counts[{seq[i], seq[i + 1]}];
      if (counts.empty()) break;
      // Highest count, lexicographically smallest pair on ties. std::map
      // iterates in sorted order, so the first maximum wins. Pairs whose
      // concatenation collides with an existing token are skipped.
      Sym left, right, merged;
      bool found = false;
      while (!counts.empty()) {
        auto best = counts.begin();
        for (auto it = counts.begin(); it != counts.end(); ++it)
          if (it->second > best->second) best = it;
        if (best->second < 2) break;
        left = best->first.first;
        right = best->first.second;
        merged = left + right;
        if (v.ids_.count(merged)) {
          counts.erase(best);
          continue;
        }
        found = true;
        break;
      }
      if (!found) break;
      v.merges_.emplace_back(left, right);
      v.add_token(merged);
      for (auto& seq : seqs) {
        std::vector<Sym> out;
        out.reserve(seq.size());
        for (size_t i = 0; i < seq.size(); ++i) {
          if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
            out.push_back(merged);
            ++i;
          } else {
            out.push_back(seq[i]);
          }
        }
        seq = std::move(out);
      }
    }
    return v;
  }

  std::vector<int> encode(const std::string& text) const {
    std::vector<Sym> seq;
    for (char32_t cp : utf8_decode(text)) seq.push_back(Sym(1, cp));
    for (const auto& [left, right] : merges_) {
      std::vector<Sym> out;
      out.reserve(seq.size());
      for (size_t i = 0; i < seq.size(); ++i) {
        if (i + 1 < seq.size() && seq[i] == left && seq[i + 1] == right) {
          out.push_back(left + right);
          ++i;
        } else {
          out.push_back(seq[i]);
        }
      }
      seq = std::move(out);
    }
    std::vector<int> ids;
    ids.reserve(seq.size());
    for (const auto& s : seq) {
      auto it = ids_.find(s);
      if (it == ids_.end()) {
        std::string bad;
        for (char32_t cp : s) utf8_append(bad, cp);
        throw UnknownCharacterError("token not in vocabulary: " + bad);
      }
      ids.push_back(it->second);
    }
    return ids;
  }

  std::string decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
      if (id < kNumSpecialTokens || id >= static_cast<int>(size()))
        throw FormatError("token id out of text range: " + std::to_string(id));
      for (char32_t cp : tokens_[id]) utf8_append(out, cp);
    }
    return out;
  }

  size_t size() const { return tokens_.size(); }
  size_t base_size() const { return base_size_; }
  const std::vector<std::pair<Sym, Sym>>& merges() const { return merges_; }

  bool token_known(char32_t cp) const { return ids_.count(Sym(1, cp)) != 0; }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for write: " + path);
    out << "unitts-bpe v1\n";
    out << "alphabet " << base_size_ - kNumSpecialTokens << "\n";
    for (size_t i = kNumSpecialTokens; i < base_size_; ++i) {
      std::string s;
      for (char32_t cp : tokens_[i]) utf8_append(s, cp);
      out << s << "\n";
    }
    out << "merges " << merges_.size() << "\n";
    for (const auto& [l, r] : merges_) {
      std::string a, b;
      for (char32_t cp : l) utf8_append(a, cp);
      for (char32_t cp : r) utf8_append(b, cp);
      out << a << "\t" << b << "\n";
    }
    if (!out) throw FormatError("short write: " + path);
  }

  static BpeVocab load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open for read: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "unitts-bpe v1")
      throw FormatError("bad bpe vocab header in " + path);
    BpeVocab v;
    v.seed_specials_and_atomics();
    size_t n_alpha = 0, n_merges = 0;
    if (!(in >> line >> n_alpha) || line != "alphabet") throw FormatError("bad alphabet header");
    std::getline(in, line);
    for (size_t i = 0; i < n_alpha; ++i) {
      if (!std::getline(in, line)) throw FormatError("truncated alphabet in " + path);
      auto cps = utf8_decode(line);
      Sym s(cps.begin(), cps.end());
      if (!v.ids_.count(s)) v.add_token(s);
    }
    v.base_size_ = v.tokens_.size();
    if (!(in >> line >> n_merges) || line != "merges") throw FormatError("bad merges header");
    std::getline(in, line);
    for (size_t i = 0; i < n_merges; ++i) {
      if (!std::getline(in, line)) throw FormatError("truncated merges in " + path);
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError("bad merge line in " + path);
      auto lcp = utf8_decode(line.substr(0, tab));
      auto rcp = utf8_decode(line.substr(tab + 1));
      Sym l(lcp.begin(), lcp.end()), r(rcp.begin(), rcp.end());
      v.merges_.emplace_back(l, r);
      v.add_token(l + r);
    }
    return v;
  }

 private:
  void seed_specials_and_atomics() {
    tokens_.clear();
    ids_.clear();
    merges_.clear();
    // Specials occupy fixed low ids; their symbols are placeholders that can
    // never collide with single codepoints.
    for (const char* name : {"<bos>", "<sep_text>", "<sep_unit>", "<eos>", "<spk>"}) {
      auto cps = utf8_decode(name);
      add_token(Sym(cps.begin(), cps.end()));
    }
    for (char32_t cp : atomic_codepoints()) add_token(Sym(1, cp));
  }

  void init_alphabet(const std::vector<std::string>& corpus) {
    seed_specials_and_atomics();
    std::set<char32_t> seen;
    for (const auto& s : corpus)
      for (char32_t cp : utf8_decode(s)) seen.insert(cp);
    for (char32_t cp : seen) {
      Sym s(1, cp);
      if (!ids_.count(s)) add_token(s);
    }
    base_size_ = tokens_.size();
  }

  void add_token(const Sym& s) {
    if (ids_.count(s)) throw FormatError("duplicate bpe token");
    ids_[s] = static_cast<int>(tokens_.size());
    tokens_.push_back(s);
  }

  std::vector<Sym> tokens_;
  std::map<Sym, int> ids_;
  std::vector<std::pair<Sym, Sym>> merges_;
  size_t base_size_ = 0;
};

}  // namespace unitts
