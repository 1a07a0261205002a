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

#include "suprahmm/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "suprahmm/error.hpp"

namespace suprahmm {

namespace {

constexpr int kRequiredRate = 16000;

std::uint32_t read_u32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void put_u32(std::string &out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioClip read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= n) {
    const unsigned char *chunk = p + off;
    std::uint32_t chunk_len = read_u32(chunk + 4);
    const unsigned char *body = chunk + 8;
    if (off + 8 + chunk_len > n) {
      throw FormatError("truncated chunk in WAV file: " + path.string());
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        throw FormatError("short fmt chunk in WAV file: " + path.string());
      }
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    off += 8 + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr) {
    throw FormatError("WAV file missing fmt or data chunk: " + path.string());
  }
  if (format != 1) {
    throw FormatError("WAV file is not linear PCM (format tag " +
                      std::to_string(format) + "): " + path.string());
  }
  if (bits != 16) {
    throw FormatError("WAV file is not 16-bit (" + std::to_string(bits) +
                      " bits): " + path.string());
  }
  if (channels != 1) {
    throw FormatError("WAV file is not mono (" + std::to_string(channels) +
                      " channels): " + path.string());
  }
  if (static_cast<int>(rate) != kRequiredRate) {
    throw FormatError("WAV sample rate " + std::to_string(rate) +
                      " Hz unsupported, expected 16000 Hz: " + path.string());
  }

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  std::uint32_t count = data_len / 2;
  clip.samples.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::int16_t s = static_cast<std::int16_t>(read_u16(data + 2 * i));
    clip.samples[i] = static_cast<double>(s);
  }
  return clip;
}

void write_wav(const std::filesystem::path &path, const AudioClip &clip) {
  if (clip.sample_rate <= 0) throw ConfigError("write_wav: sample_rate <= 0");
  std::string out;
  const std::uint32_t count = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_len = count * 2;
  out.reserve(44 + data_len);

  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits
  out.append("data");
  put_u32(out, data_len);
  for (std::uint32_t i = 0; i < count; ++i) {
    double v = std::round(clip.samples[i]);
    v = std::clamp(v, -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write WAV file: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("short write to WAV file: " + path.string());
}

AudioClip preemphasize(const AudioClip &clip, double coeff) {
  if (clip.samples.empty()) throw ConfigError("preemphasize: empty clip");
  if (!(coeff >= 0.0 && coeff < 1.0)) {
    throw ConfigError("preemphasize: coefficient must be in [0, 1)");
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(clip.samples.size());
  out.samples[0] = clip.samples[0];
  for (std::size_t i = 1; i < clip.samples.size(); ++i) {
    out.samples[i] = clip.samples[i] - coeff * clip.samples[i - 1];
  }
  return out;
}

}  // namespace suprahmm
