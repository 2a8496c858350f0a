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
#include <sstream>
#include <string>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

// Flat `key = value` run configuration. Every tunable default lives here;
// unknown keys are rejected on load.
class RunConfig {
 public:
  RunConfig() : values_(defaults()) {}

  static const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"seed", "42"},
        {"audio.sample_rate", "8000"},
        {"mel.bins", "40"},
        {"stft.window", "256"},
        {"stft.hop", "128"},
        {"augment.p_sentence", "0.5"},
        {"augment.p_char", "0.3"},
        {"augment.p_noise_drop", "0.05"},
        {"augment.p_noise_swap", "0.10"},
        {"codebook.size", "64"},
        {"codebook.downsample", "2"},
        {"codebook.max_iters", "100"},
        {"bpe.vocab_size", "512"},
        {"lm.width", "128"},
        {"lm.layers", "2"},
        {"lm.heads", "4"},
        {"lm.epochs", "3"},
        {"lm.lr", "1e-4"},
        {"lm.batch_budget", "8000"},
        {"lm.cond_dropout", "0.1"},
        {"lm.max_len_factor", "20"},
        {"lm.decode", "greedy"},
        {"lm.topk", "4"},
        {"cfm.width", "128"},
        {"cfm.layers", "2"},
        {"cfm.sigma_min", "1e-4"},
        {"cfm.steps", "10"},
        {"cfm.epochs", "8"},
        {"cfm.lr", "1e-3"},
        {"cfm.mask_lo", "0.2"},
        {"cfm.mask_hi", "0.8"},
        {"g2p.epochs", "200"},
        {"g2p.lr", "0.5"},
        {"corpus.n_speakers", "100"},
        {"corpus.utterances_per_speaker", "20"},
        {"corpus.polyphone_rate", "0.2"},
        {"corpus.tail_fraction", "0.1"},
        {"corpus.eval_sentences", "5"},
        {"infer.attach_polyphones", "true"},
        {"infer.rare_threshold", "20"},
        {"infer.griffin_lim_iters", "60"},
    };
    return d;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
  }

  long get_int(const std::string& key) const {
    const std::string& v = get_string(key);
    size_t pos = 0;
    long out = 0;
    try {
      out = std::stol(v, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not an integer: " + v);
    }
    if (pos != v.size()) throw ConfigError("config key " + key + " is not an integer: " + v);
    return out;
  }

  double get_double(const std::string& key) const {
    const std::string& v = get_string(key);
    size_t pos = 0;
    double out = 0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not a number: " + v);
    }
    if (pos != v.size()) throw ConfigError("config key " + key + " is not a number: " + v);
    return out;
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = get_string(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key " + key + " is not a bool: " + v);
  }

  uint64_t seed() const { return static_cast<uint64_t>(get_int("seed")); }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw ConfigError("unknown config key: " + key);
    values_[key] = value;
    validate();
  }

  void validate() const {
    for (const char* k : {"augment.p_sentence", "augment.p_char", "augment.p_noise_drop",
                          "augment.p_noise_swap", "lm.cond_dropout", "corpus.tail_fraction",
                          "corpus.polyphone_rate"}) {
      double p = get_double(k);
      if (p < 0.0 || p > 1.0) throw ConfigError(std::string(k) + " must be in [0, 1]");
    }
    if (get_double("augment.p_noise_drop") + get_double("augment.p_noise_swap") > 1.0)
      throw ConfigError("augment.p_noise_drop + augment.p_noise_swap must be <= 1");
    for (const char* k : {"codebook.size", "codebook.downsample", "bpe.vocab_size", "lm.width",
                          "lm.layers", "lm.heads", "lm.epochs", "lm.batch_budget", "cfm.steps",
                          "cfm.width", "cfm.layers", "cfm.epochs", "g2p.epochs",
                          "corpus.n_speakers", "corpus.utterances_per_speaker",
                          "infer.griffin_lim_iters", "lm.max_len_factor"}) {
      if (get_int(k) < 1) throw ConfigError(std::string(k) + " must be >= 1");
    }
    double sigma = get_double("cfm.sigma_min");
    if (sigma < 0.0 || sigma > 0.1) throw ConfigError("cfm.sigma_min must be in [0, 0.1]");
    double lo = get_double("cfm.mask_lo"), hi = get_double("cfm.mask_hi");
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) throw ConfigError("cfm mask split range invalid");
    const std::string& dec = get_string("lm.decode");
    if (dec != "greedy" && dec != "topk") throw ConfigError("lm.decode must be greedy or topk");
    if (get_int("mel.bins") != 40 || get_int("stft.window") != 256 || get_int("stft.hop") != 128 ||
        get_int("audio.sample_rate") != 8000)
      throw ConfigError("acoustic front-end constants are pinned to 40 bins / 8 kHz / 256 / 128");
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for write: " + path);
    out << "# unitts run configuration\n";
    for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    if (!out) throw FormatError("short write: " + path);
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open for read: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      std::string t = trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
      if (!cfg.values_.count(key))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown config key: " + key);
      cfg.values_[key] = value;
    }
    cfg.validate();
    return cfg;
  }

  bool operator==(const RunConfig& o) const = default;

  std::string summary() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << "=" << v << " ";
    return out.str();
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace unitts
