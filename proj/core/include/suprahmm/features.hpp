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

#ifndef SUPRAHMM_FEATURES_HPP
#define SUPRAHMM_FEATURES_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "suprahmm/audio.hpp"

namespace suprahmm {

// Analysis frames: 16 ms windows advanced by frame_len - overlap.
struct FrameSpec {
  double frame_len_ms = 16.0;
  double overlap_ms = 9.0;
  double preemphasis = 0.97;

  int frame_samples(int sample_rate) const;
  int hop_samples(int sample_rate) const;
  void validate(int sample_rate) const;
};

// Full front-end configuration. Defaults give the 32-dim feature layout:
// 16 static cepstra (coefficients 1..16, Hamming window, 26 triangular mel
// filters over 0..8 kHz, 512-point transform) plus 16 deltas.
struct MfccConfig {
  FrameSpec frame;
  int n_static = 16;
  int n_filters = 26;
  int fft_size = 512;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  double log_floor = 1e-10;
  int delta_window = 2;

  int feature_dim() const { return 2 * n_static; }
  // Canonical one-line description; hashed into bank manifests so a bank
  // refuses features produced under a different front end.
  std::string describe(int sample_rate) const;
  std::uint64_t hash(int sample_rate) const;
};

// A matrix of feature vectors, frame-major.
struct FeatureSequence {
  int dim = 0;
  std::vector<double> data;  // frame_count * dim
  std::string source_id;

  int frame_count() const {
    return dim > 0 ? static_cast<int>(data.size()) / dim : 0;
  }
  std::span<const double> frame(int t) const {
    return {data.data() + static_cast<std::size_t>(t) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> frame(int t) {
    return {data.data() + static_cast<std::size_t>(t) * dim,
            static_cast<std::size_t>(dim)};
  }
  void validate() const;  // finite entries, dim > 0, at least one frame
};

// Cuts the clip into frames; trailing samples that do not fill a frame are
// dropped. Frame count = floor((L - frame) / hop) + 1.
std::vector<std::vector<double>> frame_signal(const AudioClip &clip,
                                              const FrameSpec &spec);

// Static + delta MFCC feature extraction (applies pre-emphasis first).
FeatureSequence mfcc_extract(const AudioClip &clip, const MfccConfig &config);

// delta[t] = sum_d d * (x[t+d] - x[t-d]) / (2 * sum_d d^2), edges replicated.
// Returns the input with the delta block appended (dim doubles).
FeatureSequence delta_append(const FeatureSequence &statics, int window = 2);

// Feature file: "SUPRAHMM-FEAT v1 <frame_count> <dim>\n" then row-major
// little-endian float32. save(load(f)) is byte-identical.
FeatureSequence load_features(const std::filesystem::path &path);
void save_features(const std::filesystem::path &path,
                   const FeatureSequence &features);

}  // namespace suprahmm

#endif  // SUPRAHMM_FEATURES_HPP
