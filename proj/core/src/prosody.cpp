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

#include "suprahmm/prosody.hpp"

#include <cmath>
#include <sstream>

#include "suprahmm/error.hpp"
#include "suprahmm/features.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

MeanVar mean_var(const std::vector<double> &values) {
  MeanVar out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  for (double v : values) out.var += (v - out.mean) * (v - out.mean);
  out.var /= static_cast<double>(values.size());
  return out;
}

// Normalized-autocorrelation fundamental estimate for one window, in
// hundreds of Hz; 0 when the window is quiet or aperiodic.
double pitch_proxy(std::span<const double> window, int sample_rate,
                   const ProsodyConfig &config) {
  const int len = static_cast<int>(window.size());
  double r0 = 0.0;
  for (double v : window) r0 += v * v;
  if (len < 2 || r0 / len <= config.energy_floor) return 0.0;
  const int lag_min = static_cast<int>(sample_rate / config.pitch_max_hz);
  const int lag_max = static_cast<int>(sample_rate / config.pitch_min_hz);
  int best_lag = 0;
  double best = 0.0;
  for (int lag = lag_min; lag <= lag_max && lag < len; ++lag) {
    double r = 0.0;
    for (int n = 0; n + lag < len; ++n) r += window[n] * window[n + lag];
    if (r > best) {
      best = r;
      best_lag = lag;
    }
  }
  if (best_lag == 0 || best / r0 <= config.voicing_threshold) return 0.0;
  return sample_rate / static_cast<double>(best_lag) / 100.0;
}

}  // namespace

std::string ProsodyConfig::describe(int sample_rate) const {
  std::ostringstream os;
  os << "prosody rate=" << sample_rate << " energy_ms=" << energy_frame_ms
     << " pitch_ms=" << pitch_frame_ms << " floor=" << energy_floor
     << " voicing=" << voicing_threshold << " f0=" << pitch_min_hz << ".."
     << pitch_max_hz;
  return os.str();
}

std::uint64_t ProsodyConfig::hash(int sample_rate) const {
  return fnv1a64(describe(sample_rate));
}

void ProsodicSequence::validate() const {
  if (dim <= 0) throw ConfigError("ProsodicSequence: dim <= 0");
  if (data.empty() || data.size() % dim != 0) {
    throw ConfigError(
        "ProsodicSequence: data is not a whole number of segments");
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw ConfigError("ProsodicSequence: non-finite entry (" + source_id +
                        ")");
    }
  }
}

ProsodicSequence prosodic_extract(const AudioClip &clip,
                                  const std::vector<SampleRange> &boundaries,
                                  const ProsodyConfig &config) {
  if (boundaries.empty()) {
    throw ConfigError("prosodic_extract: no segments");
  }
  const std::int64_t clip_len = clip.length();
  std::int64_t cursor = 0;
  for (const SampleRange &range : boundaries) {
    if (range.length() <= 0) {
      throw ConfigError("prosodic_extract: degenerate segment [" +
                        std::to_string(range.begin) + ", " +
                        std::to_string(range.end) + ")");
    }
    if (range.begin < cursor || range.end > clip_len) {
      throw ConfigError(
          "prosodic_extract: segments must be ordered, disjoint, and inside "
          "the clip");
    }
    cursor = range.end;
  }

  const int energy_len =
      std::max<int>(1, static_cast<int>(config.energy_frame_ms *
                                            clip.sample_rate / 1000.0 +
                                        0.5));
  const int pitch_len =
      std::max<int>(1, static_cast<int>(config.pitch_frame_ms *
                                            clip.sample_rate / 1000.0 +
                                        0.5));

  ProsodicSequence out;
  out.dim = config.dim();
  out.data.reserve(boundaries.size() * out.dim);

  std::vector<double> normalized;
  std::vector<double> log_energies;
  std::vector<double> pitches;
  for (const SampleRange &range : boundaries) {
    const int len = static_cast<int>(range.length());
    normalized.resize(len);
    for (int i = 0; i < len; ++i) {
      normalized[i] = clip.samples[range.begin + i] / 32768.0;
    }

    log_energies.clear();
    for (int t = 0; t < len; t += energy_len) {
      const int n = std::min(energy_len, len - t);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += normalized[t + i] * normalized[t + i];
      log_energies.push_back(std::log(std::max(acc / n, config.energy_floor)));
    }
    MeanVar energy = mean_var(log_energies);

    pitches.clear();
    for (int t = 0; t < len; t += pitch_len) {
      const int n = std::min(pitch_len, len - t);
      pitches.push_back(pitch_proxy({normalized.data() + t,
                                     static_cast<std::size_t>(n)},
                                    clip.sample_rate, config));
    }
    MeanVar pitch = mean_var(pitches);

    int crossings = 0;
    for (int i = 1; i < len; ++i) {
      if (normalized[i - 1] * normalized[i] < 0.0) ++crossings;
    }
    const double zcr =
        len > 1 ? static_cast<double>(crossings) / (len - 1) : 0.0;

    out.data.push_back(energy.mean);
    out.data.push_back(energy.var);
    out.data.push_back(pitch.mean);
    out.data.push_back(pitch.var);
    out.data.push_back(static_cast<double>(len) / clip_len);
    out.data.push_back(zcr);
  }
  out.validate();
  return out;
}

ProsodicSequence load_prosody(const std::filesystem::path &path) {
  FeatureSequence raw = load_features(path);
  ProsodicSequence out;
  out.dim = raw.dim;
  out.data = std::move(raw.data);
  out.source_id = std::move(raw.source_id);
  out.validate();
  return out;
}

void save_prosody(const std::filesystem::path &path,
                  const ProsodicSequence &prosody) {
  prosody.validate();
  FeatureSequence raw;
  raw.dim = prosody.dim;
  raw.data = prosody.data;
  raw.source_id = prosody.source_id;
  save_features(path, raw);
}

}  // namespace suprahmm
