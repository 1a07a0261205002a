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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "suprahmm/audio.hpp"
#include "suprahmm/error.hpp"
#include "suprahmm/features.hpp"
#include "test_support.hpp"

using namespace suprahmm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Second, deliberately naive implementation of the front end for the
// first analysis frame: direct O(n^2) DFT, filter weights and cosine
// transform computed inline from their definitions.
std::vector<double> reference_first_frame(const AudioClip &clip,
                                          const MfccConfig &config) {
  const int rate = clip.sample_rate;
  const int frame_len =
      static_cast<int>(config.frame.frame_len_ms * rate / 1000.0 + 0.5);
  const int nfft = config.fft_size;

  std::vector<double> x(frame_len);
  for (int i = 0; i < frame_len; ++i) {
    double prev = i > 0 ? clip.samples[i - 1] : 0.0;
    double emphasized =
        i == 0 ? clip.samples[0]
               : clip.samples[i] - config.frame.preemphasis * prev;
    double window = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (frame_len - 1));
    x[i] = emphasized / 32768.0 * window;
  }

  const int bins = nfft / 2 + 1;
  std::vector<double> magnitude(bins);
  for (int b = 0; b < bins; ++b) {
    double re = 0.0, im = 0.0;
    for (int n = 0; n < frame_len; ++n) {
      double angle = -2.0 * kPi * b * n / nfft;
      re += x[n] * std::cos(angle);
      im += x[n] * std::sin(angle);
    }
    magnitude[b] = std::sqrt(re * re + im * im);
  }

  auto to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto to_hz = [](double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  };
  const double lo = to_mel(config.mel_low_hz), hi = to_mel(config.mel_high_hz);
  std::vector<double> log_mel(config.n_filters);
  for (int f = 0; f < config.n_filters; ++f) {
    double left = to_hz(lo + (hi - lo) * f / (config.n_filters + 1));
    double center = to_hz(lo + (hi - lo) * (f + 1) / (config.n_filters + 1));
    double right = to_hz(lo + (hi - lo) * (f + 2) / (config.n_filters + 1));
    double acc = 0.0;
    for (int b = 0; b < bins; ++b) {
      double hz = static_cast<double>(b) * rate / nfft;
      double w = 0.0;
      if (hz > left && hz < center) {
        w = (hz - left) / (center - left);
      } else if (hz >= center && hz < right) {
        w = (right - hz) / (right - center);
      }
      acc += w * magnitude[b];
    }
    log_mel[f] = std::log(std::max(acc, config.log_floor));
  }

  std::vector<double> cepstra(config.n_static);
  for (int k = 1; k <= config.n_static; ++k) {
    double acc = 0.0;
    for (int m = 0; m < config.n_filters; ++m) {
      acc += log_mel[m] *
             std::cos(kPi * k * (2 * m + 1) / (2.0 * config.n_filters));
    }
    cepstra[k - 1] = std::sqrt(2.0 / config.n_filters) * acc;
  }
  return cepstra;
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "suprahmm-features-test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("frame counts follow the sliding-window formula") {
  FrameSpec spec;
  const int rate = 16000;
  const int frame = spec.frame_samples(rate);
  const int hop = spec.hop_samples(rate);
  CHECK(frame == 256);
  CHECK(hop == 112);

  AudioClip exact = testing::noise_clip(1, frame, rate);
  CHECK(frame_signal(exact, spec).size() == 1);

  AudioClip two = testing::noise_clip(2, frame + hop, rate);
  CHECK(frame_signal(two, spec).size() == 2);

  AudioClip almost = testing::noise_clip(3, frame + hop - 1, rate);
  CHECK(frame_signal(almost, spec).size() == 1);

  AudioClip longer = testing::noise_clip(4, 8000, rate);
  CHECK(frame_signal(longer, spec).size() ==
        static_cast<std::size_t>((8000 - frame) / hop + 1));
}

TEST_CASE("too-short clips are rejected by the framer") {
  FrameSpec spec;
  AudioClip tiny = testing::noise_clip(5, 100);
  CHECK_THROWS_AS(frame_signal(tiny, spec), ConfigError);
}

TEST_CASE("every extracted frame vector has the full static+delta width") {
  AudioClip clip = testing::noise_clip(6, 8000);
  MfccConfig config;
  FeatureSequence feats = mfcc_extract(clip, config);
  CHECK(feats.dim == 32);
  CHECK(feats.dim == config.feature_dim());
  CHECK(feats.frame_count() == (8000 - 256) / 112 + 1);
}

TEST_CASE("first-frame cepstra match an independent direct-transform "
          "reference") {
  AudioClip clip = testing::noise_clip(1234, 8000);  // 0.5 s at 16 kHz
  MfccConfig config;
  FeatureSequence feats = mfcc_extract(clip, config);
  std::vector<double> reference = reference_first_frame(clip, config);
  auto frame0 = feats.frame(0);
  for (int k = 0; k < config.n_static; ++k) {
    CHECK(std::abs(frame0[k] - reference[k]) < 1e-6);
  }
}

TEST_CASE("deltas implement the regression formula with replicated edges") {
  FeatureSequence statics;
  statics.dim = 1;
  statics.data = {1.0, 2.0, 4.0, 8.0, 16.0};
  FeatureSequence out = delta_append(statics, 2);
  REQUIRE(out.dim == 2);
  REQUIRE(out.frame_count() == 5);
  // denominator 2 * (1 + 4) = 10; edges clamp out-of-range frames
  auto delta = [&](int t) { return out.frame(t)[1]; };
  CHECK(delta(0) ==
        doctest::Approx((1 * (2.0 - 1.0) + 2 * (4.0 - 1.0)) / 10.0));
  CHECK(delta(1) ==
        doctest::Approx((1 * (4.0 - 1.0) + 2 * (8.0 - 1.0)) / 10.0));
  CHECK(delta(2) ==
        doctest::Approx((1 * (8.0 - 2.0) + 2 * (16.0 - 1.0)) / 10.0));
  CHECK(delta(4) ==
        doctest::Approx((1 * (16.0 - 8.0) + 2 * (16.0 - 4.0)) / 10.0));
  // a constant signal has zero deltas everywhere
  FeatureSequence flat;
  flat.dim = 3;
  flat.data.assign(12, 5.0);
  FeatureSequence flat_out = delta_append(flat, 2);
  for (int t = 0; t < flat_out.frame_count(); ++t) {
    for (int i = 3; i < 6; ++i) CHECK(flat_out.frame(t)[i] == 0.0);
  }
}

TEST_CASE("feature files round trip byte-identically") {
  AudioClip clip = testing::noise_clip(9, 4000);
  FeatureSequence feats = mfcc_extract(clip, MfccConfig{});
  fs::path a = temp_dir() / "a.feat";
  fs::path b = temp_dir() / "b.feat";
  save_features(a, feats);
  FeatureSequence loaded = load_features(a);
  save_features(b, loaded);

  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
  std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
  CHECK(bytes_a == bytes_b);
  CHECK(loaded.dim == feats.dim);
  CHECK(loaded.frame_count() == feats.frame_count());
}

TEST_CASE("truncated feature files are rejected") {
  AudioClip clip = testing::noise_clip(10, 4000);
  FeatureSequence feats = mfcc_extract(clip, MfccConfig{});
  fs::path path = temp_dir() / "truncated.feat";
  save_features(path, feats);
  auto size = fs::file_size(path);
  fs::resize_file(path, size / 2);
  CHECK_THROWS_AS(load_features(path), FormatError);

  fs::path garbage = temp_dir() / "garbage.feat";
  std::ofstream(garbage) << "not a feature file";
  CHECK_THROWS_AS(load_features(garbage), FormatError);
}

TEST_CASE("the front-end description pins every knob") {
  MfccConfig config;
  std::string description = config.describe(16000);
  CHECK(description.find("static=16") != std::string::npos);
  CHECK(description.find("filters=26") != std::string::npos);
  CHECK(config.hash(16000) != config.hash(8000));
  MfccConfig other = config;
  other.n_static = 12;
  CHECK(config.hash(16000) != other.hash(16000));
}
