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

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "unitts/common.hpp"
#include "unitts/oracle.hpp"
#include "unitts/phones.hpp"

namespace unitts {

// One JSON-Lines corpus row. Exactly one of speaker_params or wav_path is
// set.
struct ManifestRow {
  std::string id;
  std::string text;    // possibly carrying bracketed phonetic groups
  PhoneSeq phones;     // rendered pronunciation ground truth
  std::string speaker_id;
  std::optional<SpeakerParams> speaker_params;
  std::optional<std::string> wav_path;
};

struct Manifest {
  std::vector<ManifestRow> rows;

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

inline nlohmann::json speaker_params_to_json(const SpeakerParams& p) {
  return nlohmann::json{{"f0_base", p.f0_base},
                        {"formant_shift", p.formant_shift},
                        {"spectral_tilt", p.spectral_tilt},
                        {"rate", p.rate},
                        {"seed", p.seed}};
}

inline SpeakerParams speaker_params_from_json(const nlohmann::json& j) {
  SpeakerParams p;
  p.f0_base = j.at("f0_base").get<double>();
  p.formant_shift = j.at("formant_shift").get<double>();
  p.spectral_tilt = j.at("spectral_tilt").get<double>();
  p.rate = j.at("rate").get<double>();
  p.seed = j.at("seed").get<uint64_t>();
  return p;
}

inline void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for write: " + path);
  for (const auto& r : m.rows) {
    nlohmann::json j{{"id", r.id},
                     {"text", r.text},
                     {"phones", r.phones.str()},
                     {"speaker_id", r.speaker_id}};
    if (r.speaker_params) j["speaker_params"] = speaker_params_to_json(*r.speaker_params);
    if (r.wav_path) j["wav_path"] = *r.wav_path;
    out << j.dump() << "\n";
  }
  if (!out) throw FormatError("short write: " + path);
}

inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open for read: " + path);
  Manifest m;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    ManifestRow r;
    try {
      r.id = j.at("id").get<std::string>();
      r.text = j.at("text").get<std::string>();
      r.phones = PhoneSeq::parse(j.at("phones").get<std::string>());
      r.speaker_id = j.at("speaker_id").get<std::string>();
      if (j.contains("speaker_params")) r.speaker_params = speaker_params_from_json(j["speaker_params"]);
      if (j.contains("wav_path")) r.wav_path = j["wav_path"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    if (r.speaker_params.has_value() == r.wav_path.has_value())
      throw FormatError("manifest line " + std::to_string(lineno) +
                        ": need exactly one of speaker_params or wav_path");
    if (!seen.insert(r.id).second)
      throw FormatError("manifest line " + std::to_string(lineno) + ": duplicate id " + r.id);
    m.rows.push_back(std::move(r));
  }
  return m;
}

}  // namespace unitts
