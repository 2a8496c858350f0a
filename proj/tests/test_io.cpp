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
#include <filesystem>
#include <fstream>

#include "unitts/checkpoint.hpp"
#include "unitts/config.hpp"
#include "unitts/manifest.hpp"

using namespace unitts;
namespace fs = std::filesystem;

namespace {
fs::path tmp_file(const std::string& name) { return fs::temp_directory_path() / name; }
}  // namespace

TEST_CASE("config round-trips and validates", "[io]") {
  RunConfig cfg;
  cfg.set("augment.p_char", "0.25");
  cfg.set("seed", "99");
  auto path = tmp_file("unitts_cfg.cfg");
  cfg.save(path.string());
  auto back = RunConfig::load(path.string());
  CHECK(back == cfg);
  CHECK(back.get_double("augment.p_char") == 0.25);
  CHECK(back.seed() == 99);
  fs::remove(path);

  SECTION("unknown keys are rejected") {
    auto bad = tmp_file("unitts_bad.cfg");
    std::ofstream out(bad.string());
    out << "no.such.key = 1\n";
    out.close();
    CHECK_THROWS_AS(RunConfig::load(bad.string()), ConfigError);
    fs::remove(bad);
    CHECK_THROWS_AS(cfg.set("nope", "1"), ConfigError);
  }
  SECTION("probabilities validated") {
    CHECK_THROWS_AS(cfg.set("augment.p_char", "1.5"), ConfigError);
    CHECK_THROWS_AS(cfg.set("augment.p_noise_drop", "0.6"),
                    ConfigError);  // 0.6 + 0.10 swap > 1 is fine; set swap high first
    RunConfig c2;
    c2.set("augment.p_noise_swap", "0.9");
    CHECK_THROWS_AS(c2.set("augment.p_noise_drop", "0.2"), ConfigError);
  }
  SECTION("comments and blank lines are accepted") {
    auto p = tmp_file("unitts_c.cfg");
    std::ofstream out(p.string());
    out << "# comment\n\nseed = 7 # trailing\n";
    out.close();
    CHECK(RunConfig::load(p.string()).seed() == 7);
    fs::remove(p);
  }
}

TEST_CASE("checkpoints round-trip bitwise", "[io]") {
  Checkpoint ck;
  Rng rng(5);
  std::vector<float> a(12), b(40);
  for (auto& x : a) x = static_cast<float>(rng.normal());
  for (auto& x : b) x = static_cast<float>(rng.normal());
  ck.put_matrix("layer.w", 3, 4, a);
  ck.put_vector("layer.b", b);
  ck.put_scalar("meta.version", 3.0f);

  auto path = tmp_file("unitts_ck.bvck");
  ck.save(path.string());
  auto back = Checkpoint::load(path.string());
  CHECK(back == ck);
  CHECK(back.get("layer.w").dims == std::vector<uint64_t>{3, 4});

  SECTION("payload corruption is caught by the CRC") {
    std::fstream f(path.string(), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(60);
    char byte;
    f.seekg(60);
    f.get(byte);
    byte ^= 0x10;
    f.seekp(60);
    f.put(byte);
    f.close();
    CHECK_THROWS_AS(Checkpoint::load(path.string()), FormatError);
  }
  SECTION("missing tensor name errors explicitly") {
    CHECK_THROWS_WITH(ck.get("not.there"), Catch::Matchers::ContainsSubstring("missing tensor"));
  }
  fs::remove(path);
}

TEST_CASE("manifest loader validates rows", "[io]") {
  Manifest m;
  ManifestRow r;
  r.id = "utt0";
  r.text = "你好";
  r.phones = PhoneSeq::parse("ㄋ ㄧ ˇ ㄏ ㄠ ˇ");
  r.speaker_id = "spk0";
  r.speaker_params = SpeakerParams{};
  m.rows.push_back(r);
  r.id = "utt1";
  r.speaker_params.reset();
  r.wav_path = "x.wav";
  m.rows.push_back(r);

  auto path = tmp_file("unitts_manifest.jsonl");
  save_manifest(m, path.string());
  auto back = load_manifest(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back.rows[0].id == "utt0");
  CHECK(back.rows[0].speaker_params.has_value());
  CHECK(back.rows[1].wav_path.value() == "x.wav");
  CHECK(back.rows[0].phones == m.rows[0].phones);
  fs::remove(path);

  SECTION("duplicate ids rejected with line number") {
    std::ofstream out(path.string());
    out << R"({"id":"a","text":"x","phones":"ㄚ ˉ","speaker_id":"s","wav_path":"w.wav"})" << "\n";
    out << R"({"id":"a","text":"y","phones":"ㄚ ˉ","speaker_id":"s","wav_path":"w.wav"})" << "\n";
    out.close();
    CHECK_THROWS_WITH(load_manifest(path.string()), Catch::Matchers::ContainsSubstring("line 2"));
    fs::remove(path);
  }
  SECTION("both or neither speaker source rejected") {
    std::ofstream out(path.string());
    out << R"({"id":"a","text":"x","phones":"ㄚ ˉ","speaker_id":"s"})" << "\n";
    out.close();
    CHECK_THROWS_AS(load_manifest(path.string()), FormatError);
    fs::remove(path);
  }
  SECTION("malformed json reported with line number") {
    std::ofstream out(path.string());
    out << "{not json\n";
    out.close();
    CHECK_THROWS_WITH(load_manifest(path.string()), Catch::Matchers::ContainsSubstring("line 1"));
    fs::remove(path);
  }
}
