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

#include "suprahmm/features.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <sstream>

#include "suprahmm/error.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// In-place iterative radix-2 FFT; n must be a power of two.
void fft(std::vector<std::complex<double>> &a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wl(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Triangular filters with centers equally spaced on the mel scale.
// filters[f] holds weights over the fft_size/2 + 1 magnitude bins.
std::vector<std::vector<double>> mel_filterbank(const MfccConfig &config,
                                                int sample_rate) {
  const int bins = config.fft_size / 2 + 1;
  const double lo = hz_to_mel(config.mel_low_hz);
  const double hi = hz_to_mel(config.mel_high_hz);
  std::vector<double> centers(config.n_filters + 2);
  for (int i = 0; i < config.n_filters + 2; ++i) {
    double mel = lo + (hi - lo) * i / (config.n_filters + 1);
    centers[i] = mel_to_hz(mel);
  }
  std::vector<std::vector<double>> filters(
      config.n_filters, std::vector<double>(bins, 0.0));
  for (int f = 0; f < config.n_filters; ++f) {
    const double left = centers[f], center = centers[f + 1],
                 right = centers[f + 2];
    for (int b = 0; b < bins; ++b) {
      double hz = static_cast<double>(b) * sample_rate / config.fft_size;
      if (hz > left && hz < center) {
        filters[f][b] = (hz - left) / (center - left);
      } else if (hz >= center && hz < right) {
        filters[f][b] = (right - hz) / (right - center);
      }
    }
  }
  return filters;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

int FrameSpec::frame_samples(int sample_rate) const {
  return static_cast<int>(frame_len_ms * sample_rate / 1000.0 + 0.5);
}

int FrameSpec::hop_samples(int sample_rate) const {
  return static_cast<int>((frame_len_ms - overlap_ms) * sample_rate / 1000.0 +
                          0.5);
}

void FrameSpec::validate(int sample_rate) const {
  if (sample_rate <= 0) throw ConfigError("FrameSpec: sample rate <= 0");
  if (!(overlap_ms > 0.0 && overlap_ms < frame_len_ms)) {
    throw ConfigError("FrameSpec: need 0 < overlap < frame length");
  }
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    throw ConfigError("FrameSpec: pre-emphasis must be in [0, 1)");
  }
  if (frame_samples(sample_rate) < 1 || hop_samples(sample_rate) < 1) {
    throw ConfigError("FrameSpec: frame or hop below one sample");
  }
}

std::string MfccConfig::describe(int sample_rate) const {
  std::ostringstream os;
  os << "mfcc rate=" << sample_rate << " frame_ms=" << frame.frame_len_ms
     << " overlap_ms=" << frame.overlap_ms << " preemph=" << frame.preemphasis
     << " static=" << n_static << " filters=" << n_filters
     << " fft=" << fft_size << " mel=" << mel_low_hz << ".." << mel_high_hz
     << " floor=" << log_floor << " delta=" << delta_window;
  return os.str();
}

std::uint64_t MfccConfig::hash(int sample_rate) const {
  return fnv1a64(describe(sample_rate));
}

void FeatureSequence::validate() const {
  if (dim <= 0) throw ConfigError("FeatureSequence: dim <= 0");
  if (data.empty() || data.size() % dim != 0) {
    throw ConfigError("FeatureSequence: data is not a whole number of frames");
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw ConfigError("FeatureSequence: non-finite entry (" + source_id +
                        ")");
    }
  }
}

std::vector<std::vector<double>> frame_signal(const AudioClip &clip,
                                              const FrameSpec &spec) {
  spec.validate(clip.sample_rate);
  const int frame = spec.frame_samples(clip.sample_rate);
  const int hop = spec.hop_samples(clip.sample_rate);
  const int len = clip.length();
  if (len < frame) {
    throw ConfigError("frame_signal: clip shorter than one frame (" +
                      std::to_string(len) + " < " + std::to_string(frame) +
                      " samples)");
  }
  const int count = (len - frame) / hop + 1;
  std::vector<std::vector<double>> frames(count);
  for (int t = 0; t < count; ++t) {
    frames[t].assign(clip.samples.begin() + static_cast<std::size_t>(t) * hop,
                     clip.samples.begin() + static_cast<std::size_t>(t) * hop +
                         frame);
  }
  return frames;
}

FeatureSequence mfcc_extract(const AudioClip &clip, const MfccConfig &config) {
  if (!is_power_of_two(config.fft_size)) {
    throw ConfigError("mfcc_extract: fft_size must be a power of two");
  }
  if (config.n_static < 1 || config.n_filters <= config.n_static) {
    throw ConfigError("mfcc_extract: need 1 <= n_static < n_filters");
  }
  AudioClip emphasized = preemphasize(clip, config.frame.preemphasis);
  auto frames = frame_signal(emphasized, config.frame);
  const int frame_len = static_cast<int>(frames[0].size());
  if (frame_len > config.fft_size) {
    throw ConfigError("mfcc_extract: frame longer than fft_size");
  }

  std::vector<double> window(frame_len);
  for (int i = 0; i < frame_len; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (frame_len - 1));
  }
  const auto filters = mel_filterbank(config, clip.sample_rate);
  const int bins = config.fft_size / 2 + 1;

  FeatureSequence statics;
  statics.dim = config.n_static;
  statics.data.reserve(frames.size() * config.n_static);

  std::vector<std::complex<double>> buffer(config.fft_size);
  std::vector<double> magnitude(bins);
  std::vector<double> log_mel(config.n_filters);
  for (const auto &f : frames) {
    // samples at PCM scale; normalize so the log floor is scale-consistent
    for (int i = 0; i < config.fft_size; ++i) {
      buffer[i] = i < frame_len
                      ? std::complex<double>(f[i] / 32768.0 * window[i], 0.0)
                      : std::complex<double>(0.0, 0.0);
    }
    fft(buffer);
    for (int b = 0; b < bins; ++b) magnitude[b] = std::abs(buffer[b]);
    for (int m = 0; m < config.n_filters; ++m) {
      double acc = 0.0;
      for (int b = 0; b < bins; ++b) acc += filters[m][b] * magnitude[b];
      log_mel[m] = std::log(std::max(acc, config.log_floor));
    }
    // DCT-II, orthonormal scaling; coefficient 0 (overall energy) dropped
    const double scale = std::sqrt(2.0 / config.n_filters);
    for (int k = 1; k <= config.n_static; ++k) {
      double acc = 0.0;
      for (int m = 0; m < config.n_filters; ++m) {
        acc += log_mel[m] * std::cos(kPi * k * (2 * m + 1) /
                                     (2.0 * config.n_filters));
      }
      statics.data.push_back(scale * acc);
    }
  }

  FeatureSequence out = delta_append(statics, config.delta_window);
  out.validate();
  return out;
}

FeatureSequence delta_append(const FeatureSequence &statics, int window) {
  if (statics.dim <= 0 || statics.frame_count() < 1) {
    throw ConfigError("delta_append: empty input");
  }
  if (window < 1) throw ConfigError("delta_append: window < 1");
  const int T = statics.frame_count();
  const int dim = statics.dim;
  double denom = 0.0;
  for (int d = 1; d <= window; ++d) denom += static_cast<double>(d) * d;
  denom *= 2.0;

  FeatureSequence out;
  out.dim = 2 * dim;
  out.source_id = statics.source_id;
  out.data.resize(static_cast<std::size_t>(T) * out.dim);
  auto clamp_t = [T](int t) { return t < 0 ? 0 : (t >= T ? T - 1 : t); };
  for (int t = 0; t < T; ++t) {
    auto dst = out.frame(t);
    auto src = statics.frame(t);
    for (int i = 0; i < dim; ++i) dst[i] = src[i];
    for (int i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (int d = 1; d <= window; ++d) {
        acc += d * (statics.frame(clamp_t(t + d))[i] -
                    statics.frame(clamp_t(t - d))[i]);
      }
      dst[dim + i] = acc / denom;
    }
  }
  return out;
}

FeatureSequence load_features(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw FormatError("feature file missing header: " + path.string());
  }
  std::istringstream hs(header);
  std::string magic, version;
  long long frames = -1, dim = -1;
  hs >> magic >> version >> frames >> dim;
  if (magic != "SUPRAHMM-FEAT" || version != "v1" || hs.fail()) {
    throw FormatError("bad feature file header: " + path.string());
  }
  if (frames < 1 || dim < 1) {
    throw FormatError("feature file with empty shape: " + path.string());
  }
  FeatureSequence out;
  out.dim = static_cast<int>(dim);
  out.source_id = path.stem().string();
  const std::size_t count = static_cast<std::size_t>(frames) * dim;
  out.data.resize(count);
  std::vector<unsigned char> raw(count * 4);
  in.read(reinterpret_cast<char *>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError("feature file truncated: " + path.string());
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                         (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                         (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                         (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
    float value;
    std::memcpy(&value, &bits, 4);
    out.data[i] = static_cast<double>(value);
  }
  out.validate();
  return out;
}

void save_features(const std::filesystem::path &path,
                   const FeatureSequence &features) {
  features.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write feature file: " + path.string());
  out << "SUPRAHMM-FEAT v1 " << features.frame_count() << " " << features.dim
      << "\n";
  std::vector<unsigned char> raw(features.data.size() * 4);
  for (std::size_t i = 0; i < features.data.size(); ++i) {
    float value = static_cast<float>(features.data[i]);
    std::uint32_t bits;
    std::memcpy(&bits, &value, 4);
    raw[4 * i] = static_cast<unsigned char>(bits & 0xff);
    raw[4 * i + 1] = static_cast<unsigned char>((bits >> 8) & 0xff);
    raw[4 * i + 2] = static_cast<unsigned char>((bits >> 16) & 0xff);
    raw[4 * i + 3] = static_cast<unsigned char>((bits >> 24) & 0xff);
  }
  out.write(reinterpret_cast<const char *>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("short write to feature file: " + path.string());
}

}  // namespace suprahmm
