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
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "unitts/checkpoint.hpp"
#include "unitts/common.hpp"
#include "unitts/phones.hpp"
#include "unitts/syllable.hpp"

namespace unitts {

inline constexpr int kMaxCandidates = 4;
inline constexpr int kNumPosTags = 4;  // noun / verb / function / other

inline int pos_tag_id(const std::string& tag) {
  if (tag == "noun") return 0;
  if (tag == "verb") return 1;
  if (tag == "function") return 2;
  if (tag == "other") return 3;
  throw FormatError("unknown POS tag: " + tag);
}

inline bool is_punctuation(char32_t cp) {
  static const std::set<char32_t> punct = [] {
    std::set<char32_t> s;
    for (char32_t c : utf8_decode("，。！？、；：「」『』（）…—"))
      s.insert(c);
    for (char32_t c = 0x21; c <= 0x2f; ++c) s.insert(c);
    for (char32_t c = 0x3a; c <= 0x40; ++c) s.insert(c);
    s.insert(U' ');
    return s;
  }();
  return punct.count(cp) != 0;
}

// char -> ordered candidate pronunciations; candidate 0 is the default.
class PronDict {
 public:
  static PronDict load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open dictionary: " + path);
    PronDict d;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw FormatError("dictionary line " + std::to_string(lineno) + ": expected char<TAB>cands");
      auto cps = utf8_decode(line.substr(0, tab));
      if (cps.size() != 1)
        throw FormatError("dictionary line " + std::to_string(lineno) + ": key must be one character");
      char32_t ch = cps[0];
      std::vector<PhoneSeq> cands;
      std::stringstream ss(line.substr(tab + 1));
      std::string item;
      while (std::getline(ss, item, '|')) {
        PhoneSeq p = PhoneSeq::parse(item);
        validate_phone_seq(p);
        if (p.empty())
          throw FormatError("dictionary line " + std::to_string(lineno) + ": empty candidate");
        for (const auto& prev : cands)
          if (prev == p)
            throw FormatError("dictionary line " + std::to_string(lineno) + ": duplicate candidate");
        cands.push_back(std::move(p));
      }
      if (cands.empty())
        throw FormatError("dictionary line " + std::to_string(lineno) + ": no candidates");
      if (static_cast<int>(cands.size()) > kMaxCandidates)
        throw FormatError("dictionary line " + std::to_string(lineno) + ": too many candidates");
      if (d.entries_.count(ch))
        throw FormatError("dictionary line " + std::to_string(lineno) + ": duplicate character");
      d.order_.push_back(ch);
      d.entries_[ch] = std::move(cands);
    }
    if (d.entries_.empty()) throw FormatError("empty dictionary: " + path);
    return d;
  }

  bool contains(char32_t ch) const { return entries_.count(ch) != 0; }
  bool is_polyphone(char32_t ch) const {
    auto it = entries_.find(ch);
    return it != entries_.end() && it->second.size() > 1;
  }
  const std::vector<PhoneSeq>& candidates(char32_t ch) const {
    auto it = entries_.find(ch);
    if (it == entries_.end()) throw UnknownCharacterError("character not in dictionary: " + utf8_encode(ch));
    return it->second;
  }
  // Characters in file order.
  const std::vector<char32_t>& chars() const { return order_; }

  std::vector<char32_t> polyphones() const {
    std::vector<char32_t> out;
    for (char32_t c : order_)
      if (is_polyphone(c)) out.push_back(c);
    return out;
  }
  std::vector<char32_t> monophones() const {
    std::vector<char32_t> out;
    for (char32_t c : order_)
      if (!is_polyphone(c)) out.push_back(c);
    return out;
  }

  // Index of a character in file order; used as a stable feature id.
  int char_index(char32_t ch) const {
    auto it = std::find(order_.begin(), order_.end(), ch);
    return it == order_.end() ? static_cast<int>(order_.size()) : static_cast<int>(it - order_.begin());
  }

 private:
  std::map<char32_t, std::vector<PhoneSeq>> entries_;
  std::vector<char32_t> order_;
};

class PosLexicon {
 public:
  static PosLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open POS lexicon: " + path);
    PosLexicon lex;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw FormatError("POS lexicon line " + std::to_string(lineno) + ": expected char<TAB>tag");
      auto cps = utf8_decode(line.substr(0, tab));
      if (cps.size() != 1)
        throw FormatError("POS lexicon line " + std::to_string(lineno) + ": key must be one character");
      lex.tags_[cps[0]] = pos_tag_id(line.substr(tab + 1));
    }
    return lex;
  }

  int tag(char32_t ch) const {
    auto it = tags_.find(ch);
    return it == tags_.end() ? 3 : it->second;  // default: other
  }

 private:
  std::map<char32_t, int> tags_;
};

struct AnnotatedChar {
  char32_t ch = 0;
  PhoneSeq pron;          // empty for punctuation
  int candidate = 0;      // index into the dictionary candidate list
  bool polyphone = false;
  bool punctuation = false;
  int pos_tag = 3;
};

struct AnnotatedText {
  std::vector<AnnotatedChar> chars;

  PhoneSeq phones() const {
    PhoneSeq out;
    for (const auto& c : chars) out.append(c.pron);
    return out;
  }
  std::string text() const {
    std::string s;
    for (const auto& c : chars) utf8_append(s, c.ch);
    return s;
  }
};

// Linear conditional classifier: per polyphone, a weight matrix over sparse
// context features feeding a softmax masked to that character's candidates.
class PolyphoneModel {
 public:
  struct Metadata {
    int epochs = 0;
    uint64_t seed = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<char32_t> degenerate;  // trained from single-class labels
  };

  PolyphoneModel() = default;
  PolyphoneModel(const PronDict& dict, const PosLexicon& lex) : dict_(&dict), lex_(&lex) {
    n_char_features_ = static_cast<int>(dict.chars().size()) + 1;  // + OOV bucket
    feature_dim_ = 4 * n_char_features_ + 4 * kNumPosTags + 1;     // window chars, window POS, bias
    for (char32_t p : dict.polyphones())
      weights_[p].assign(static_cast<size_t>(feature_dim_) * kMaxCandidates, 0.0f);
  }

  const Metadata& metadata() const { return meta_; }
  int feature_dim() const { return feature_dim_; }

  // Active feature ids for a radius-2 window around position i.
  std::vector<int> features(const std::vector<char32_t>& text, size_t i) const {
    std::vector<int> f;
    static const int offsets[4] = {-2, -1, 1, 2};
    for (int slot = 0; slot < 4; ++slot) {
      long j = static_cast<long>(i) + offsets[slot];
      int cidx = n_char_features_ - 1;  // OOV / out-of-range bucket
      int ptag = 3;
      if (j >= 0 && j < static_cast<long>(text.size())) {
        cidx = dict_->char_index(text[j]);
        ptag = lex_->tag(text[j]);
      }
      f.push_back(slot * n_char_features_ + cidx);
      f.push_back(4 * n_char_features_ + slot * kNumPosTags + ptag);
    }
    f.push_back(feature_dim_ - 1);  // bias
    return f;
  }

  struct Prediction {
    int candidate = 0;
    std::vector<double> probabilities;  // length kMaxCandidates, zero outside mask
  };

  Prediction predict(const std::vector<char32_t>& text, size_t i) const {
    char32_t ch = text.at(i);
    if (!dict_->contains(ch)) throw UnknownCharacterError("character not in dictionary: " + utf8_encode(ch));
    const auto& cands = dict_->candidates(ch);
    const int k = static_cast<int>(cands.size());
    Prediction out;
    out.probabilities.assign(kMaxCandidates, 0.0);
    auto wit = weights_.find(ch);
    std::vector<double> logits(k, 0.0);
    if (wit != weights_.end()) {
      for (int fid : features(text, i))
        for (int c = 0; c < k; ++c)
          logits[c] += wit->second[static_cast<size_t>(fid) * kMaxCandidates + c];
    }
    double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (int c = 0; c < k; ++c) z += std::exp(logits[c] - mx);
    for (int c = 0; c < k; ++c) out.probabilities[c] = std::exp(logits[c] - mx) / z;
    // Deterministic tie-break: lowest candidate index.
    out.candidate = 0;
    for (int c = 1; c < k; ++c)
      if (out.probabilities[c] > out.probabilities[out.candidate] + 1e-12) out.candidate = c;
    return out;
  }

  // Full-batch gradient descent on the masked-softmax cross-entropy.
  void train(const std::vector<AnnotatedText>& corpus, int epochs, double lr, uint64_t seed) {
    if (corpus.empty()) throw TrainError("empty polyphone training corpus");
    struct Sample {
      std::vector<int> features;
      int label;
      int k;
    };
    std::map<char32_t, std::vector<Sample>> samples;
    for (const auto& sent : corpus) {
      std::vector<char32_t> text;
      for (const auto& c : sent.chars) text.push_back(c.ch);
      for (size_t i = 0; i < sent.chars.size(); ++i) {
        const auto& c = sent.chars[i];
        if (!c.polyphone || c.punctuation) continue;
        samples[c.ch].push_back(
            {features(text, i), c.candidate, static_cast<int>(dict_->candidates(c.ch).size())});
      }
    }
    for (char32_t p : dict_->polyphones())
      if (!samples.count(p))
        throw TrainError("polyphone has no labeled occurrence in corpus: " + utf8_encode(p));

    meta_ = Metadata{};
    meta_.epochs = epochs;
    meta_.seed = seed;
    double init_loss = 0.0, final_loss = 0.0;
    size_t total = 0;
    for (auto& [ch, ss] : samples) {
      std::set<int> classes;
      for (const auto& s : ss) classes.insert(s.label);
      if (classes.size() < 2) meta_.degenerate.push_back(ch);
      auto& w = weights_[ch];
      const int k = static_cast<int>(dict_->candidates(ch).size());
      std::vector<double> grad(w.size());
      for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (const auto& s : ss) {
          std::vector<double> logits(k, 0.0);
          for (int fid : s.features)
            for (int c = 0; c < k; ++c) logits[c] += w[static_cast<size_t>(fid) * kMaxCandidates + c];
          double mx = *std::max_element(logits.begin(), logits.end());
          double z = 0.0;
          for (int c = 0; c < k; ++c) z += std::exp(logits[c] - mx);
          loss += -(logits[s.label] - mx) + std::log(z);
          for (int c = 0; c < k; ++c) {
            double p = std::exp(logits[c] - mx) / z;
            double g = p - (c == s.label ? 1.0 : 0.0);
            for (int fid : s.features) grad[static_cast<size_t>(fid) * kMaxCandidates + c] += g;
          }
        }
        loss /= ss.size();
        if (epoch == 0) init_loss += loss * ss.size();
        if (epoch == epochs - 1) final_loss += loss * ss.size();
        for (size_t i = 0; i < w.size(); ++i)
          w[i] -= static_cast<float>(lr * grad[i] / double(ss.size()));
      }
      total += ss.size();
    }
    meta_.initial_loss = init_loss / double(total);
    meta_.final_loss = final_loss / double(total);
  }

  Checkpoint to_checkpoint() const {
    Checkpoint ck;
    ck.put_scalar("g2p.feature_dim", static_cast<float>(feature_dim_));
    for (const auto& [ch, w] : weights_)
      ck.put("g2p.w." + utf8_encode(ch), Tensor{{static_cast<uint64_t>(feature_dim_), kMaxCandidates}, w});
    return ck;
  }

  void from_checkpoint(const Checkpoint& ck) {
    if (static_cast<int>(ck.get_scalar("g2p.feature_dim")) != feature_dim_)
      throw FormatError("polyphone model feature dim mismatch");
    for (auto& [ch, w] : weights_) {
      const Tensor& t = ck.get("g2p.w." + utf8_encode(ch));
      if (t.data.size() != w.size()) throw ShapeError("polyphone weight shape mismatch");
      w = t.data;
    }
  }

 private:
  const PronDict* dict_ = nullptr;
  const PosLexicon* lex_ = nullptr;
  int n_char_features_ = 0;
  int feature_dim_ = 0;
  std::map<char32_t, std::vector<float>> weights_;
  Metadata meta_;
};

inline AnnotatedText g2p_convert(const PronDict& dict, const PosLexicon& lex,
                                 const PolyphoneModel& model, const std::string& text) {
  auto cps = utf8_decode(text);
  std::vector<size_t> unknown;
  for (size_t i = 0; i < cps.size(); ++i)
    if (!dict.contains(cps[i]) && !is_punctuation(cps[i])) unknown.push_back(i);
  if (!unknown.empty()) {
    std::string msg = "unknown characters at positions:";
    for (size_t i : unknown) msg += " " + std::to_string(i) + "(" + utf8_encode(cps[i]) + ")";
    throw UnknownCharacterError(msg);
  }

  AnnotatedText out;
  for (size_t i = 0; i < cps.size(); ++i) {
    AnnotatedChar c;
    c.ch = cps[i];
    c.pos_tag = lex.tag(cps[i]);
    if (is_punctuation(cps[i])) {
      c.punctuation = true;
    } else if (!dict.is_polyphone(cps[i])) {
      c.pron = dict.candidates(cps[i])[0];
    } else {
      c.polyphone = true;
      auto pred = model.predict(cps, i);
      c.candidate = pred.candidate;
      c.pron = dict.candidates(cps[i])[pred.candidate];
    }
    out.chars.push_back(std::move(c));
  }
  return out;
}

}  // namespace unitts
