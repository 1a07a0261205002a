// Copyright 2026 The SupraHMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "suprahmm/audio.hpp"
#include "suprahmm/error.hpp"
#include "test_support.hpp"

using namespace suprahmm;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "suprahmm-audio-test";
  fs::create_directories(dir);
  return dir;
}
}  // namespace

TEST_CASE("wav files round trip through write and read") {
  AudioClip clip = testing::noise_clip(11, 4000);
  for (double &s : clip.samples) s = std::floor(s);  // integer PCM values
  fs::path path = temp_dir() / "roundtrip.wav";
  write_wav(path, clip);
  AudioClip back = read_wav(path);
  REQUIRE(back.sample_rate == clip.sample_rate);
  REQUIRE(back.length() == clip.length());
  for (int i = 0; i < clip.length(); ++i) {
    CHECK(back.samples[i] == doctest::Approx(clip.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("reading a corrupt wav reports a format error") {
  fs::path path = temp_dir() / "corrupt.wav";
  std::ofstream(path) << "this is not a wav file at all";
  CHECK_THROWS_AS(read_wav(path), FormatError);
  CHECK_THROWS_AS(read_wav(temp_dir() / "missing.wav"), IoError);
}

TEST_CASE("preemphasis with coefficient zero is the identity") {
  AudioClip clip = testing::noise_clip(3, 500);
  AudioClip out = preemphasize(clip, 0.0);
  for (int i = 0; i < clip.length(); ++i) {
    CHECK(out.samples[i] == clip.samples[i]);
  }
}

TEST_CASE("preemphasis applies the first-difference filter") {
  AudioClip clip;
  clip.samples = {1.0, 2.0, 3.0, 4.0};
  AudioClip out = preemphasize(clip, 0.5);
  CHECK(out.samples[0] == doctest::Approx(1.0));
  CHECK(out.samples[1] == doctest::Approx(2.0 - 0.5));
  CHECK(out.samples[2] == doctest::Approx(3.0 - 1.0));
  CHECK(out.samples[3] == doctest::Approx(4.0 - 1.5));
}

TEST_CASE("preemphasis rejects empty input and bad coefficients") {
  AudioClip empty;
  CHECK_THROWS_AS(preemphasize(empty, 0.9), ConfigError);
  AudioClip clip = testing::noise_clip(5, 10);
  CHECK_THROWS_AS(preemphasize(clip, 1.0), ConfigError);
  CHECK_THROWS_AS(preemphasize(clip, -0.1), ConfigError);
}
