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

#ifndef SUPRAHMM_PROSODY_HPP_
#define SUPRAHMM_PROSODY_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "suprahmm/audio.hpp"

namespace suprahmm {

// Half-open range of samples [begin, end) within a clip.
struct SampleRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }
};

// Knobs for the segment-level descriptor computation.  Defaults give a
// 6-dimensional vector per segment: mean and variance of subframe
// log-energy, mean and variance of the autocorrelation pitch proxy,
// duration as a fraction of the clip, and zero-crossing rate.
struct ProsodyConfig {
  double energy_frame_ms = 16.0;
  double pitch_frame_ms = 32.0;
  double energy_floor = 1e-10;
  double voicing_threshold = 0.3;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 400.0;

  int dim() const { return 6; }
  std::string describe(int sample_rate) const;
  std::uint64_t hash(int sample_rate) const;
};

// One fixed-size descriptor vector per segment, segment-major storage.
struct ProsodicSequence {
  int dim = 0;
  std::vector<double> data;
  std::string source_id;

  int segment_count() const {
    return dim > 0 ? static_cast<int>(data.size()) / dim : 0;
  }
  std::span<double> segment(int s) {
    return {data.data() + static_cast<std::size_t>(s) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> segment(int s) const {
    return {data.data() + static_cast<std::size_t>(s) * dim,
            static_cast<std::size_t>(dim)};
  }
  void validate() const;
};

// Computes one descriptor vector per boundary range.  Ranges must be
// ordered, non-overlapping, non-empty, and contained in the clip.
ProsodicSequence prosodic_extract(const AudioClip &clip,
                                  const std::vector<SampleRange> &boundaries,
                                  const ProsodyConfig &config = {});

// Same binary container as feature files; extension tells them apart.
ProsodicSequence load_prosody(const std::filesystem::path &path);
void save_prosody(const std::filesystem::path &path,
                  const ProsodicSequence &prosody);

}  // namespace suprahmm

#endif  // SUPRAHMM_PROSODY_HPP_
