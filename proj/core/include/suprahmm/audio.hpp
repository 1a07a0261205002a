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

#ifndef SUPRAHMM_AUDIO_HPP
#define SUPRAHMM_AUDIO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace suprahmm {

// Mono audio. Samples are kept as doubles at 16-bit PCM scale so the
// pre-emphasis filter and the feature front end stay exact; quantization
// happens only when a clip is written back to a WAV file.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  int length() const { return static_cast<int>(samples.size()); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(length()) / sample_rate : 0.0;
  }
};

// File interface is RIFF/WAVE, 16-bit PCM, mono, 16 kHz. Anything else is
// rejected with a FormatError naming the offending field.
AudioClip read_wav(const std::filesystem::path &path);
void write_wav(const std::filesystem::path &path, const AudioClip &clip);

// y[n] = x[n] - coeff * x[n-1], y[0] = x[0]. coeff in [0, 1).
AudioClip preemphasize(const AudioClip &clip, double coeff);

}  // namespace suprahmm

#endif  // SUPRAHMM_AUDIO_HPP
