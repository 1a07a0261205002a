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

#ifndef SUPRAHMM_CORPUS_HPP_
#define SUPRAHMM_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "suprahmm/audio.hpp"
#include "suprahmm/features.hpp"
#include "suprahmm/hmm2.hpp"
#include "suprahmm/prosody.hpp"

namespace suprahmm {

// The talking-condition labels used by default 6-way corpora.
extern const std::vector<std::string> kDefaultConditions;

enum class RecordKind { kAudio, kFeature };

std::string record_kind_name(RecordKind kind);
RecordKind record_kind_from_name(const std::string &name);

struct UtteranceRecord {
  std::string id;
  std::string speaker;
  std::string text;
  std::string condition;
  int rep = 0;
  std::string path;  // relative to the manifest directory
  RecordKind kind = RecordKind::kFeature;
};

struct CorpusManifest {
  int sample_rate = 16000;
  std::vector<std::string> conditions;
  std::vector<UtteranceRecord> records;
  std::filesystem::path base_dir;  // directory of the manifest, not serialized

  int condition_index(const std::string &label) const;
  void validate() const;
};

// Line-oriented text table: `suprahmm-corpus v1` header, sample_rate and
// conditions lines, then one tab-separated record per line with columns
// id, speaker, text, condition, rep, path, kind.
CorpusManifest load_manifest(const std::filesystem::path &path);
void save_manifest(const std::filesystem::path &path,
                   const CorpusManifest &manifest);

// Speaker- and text-independent split: a record lands on a side only when
// both its speaker and its text belong to that side's sets.
struct SplitPlan {
  std::set<std::string> train_speakers;
  std::set<std::string> test_speakers;
  std::set<std::string> train_texts;
  std::set<std::string> test_texts;

  void validate() const;
};

// Header `suprahmm-split v1`, then one line per set:
// train_speakers/test_speakers/train_texts/test_texts.
SplitPlan load_split(const std::filesystem::path &path);
void save_split(const std::filesystem::path &path, const SplitPlan &plan);

std::pair<std::vector<UtteranceRecord>, std::vector<UtteranceRecord>> split(
    const CorpusManifest &manifest, const SplitPlan &plan);

// A record materialized for scoring.  Audio-backed records carry the clip
// so prosody can be computed per hypothesis; feature-backed records may
// carry a stored prosodic sequence from a sibling .pros file.
struct LoadedUtterance {
  UtteranceRecord record;
  FeatureSequence features;
  std::optional<AudioClip> clip;
  std::optional<ProsodicSequence> prosody;
};

LoadedUtterance load_utterance(const CorpusManifest &manifest,
                               const UtteranceRecord &record,
                               const MfccConfig &mfcc = {});

// Layout parameters for a generated corpus.  Separation scales a
// per-condition unit-vector offset added to every generator mean, in
// units of the (unit) generator standard deviation; 0 makes every
// condition's generators identical.
struct SynthSpec {
  int n_conditions = 6;
  double acoustic_separation = 2.0;
  double prosodic_separation = 2.0;
  int speakers = 8;
  int texts = 20;
  int reps = 2;
  int min_frames = 30;
  int max_frames = 60;
  int min_segments = 4;
  int max_segments = 10;
  int dim = 32;
  int prosodic_dim = 6;
  int states = 6;
  int supra_states = 2;
  int sample_rate = 16000;

  void validate() const;
};

struct SynthResult {
  CorpusManifest manifest;
  std::vector<Hmm2Model> acoustic_truth;  // per condition
  std::vector<Hmm2Model> prosodic_truth;  // per condition
};

// Writes feature and prosody files under dir plus dir/corpus.manifest.
SynthResult synth_generate(const std::filesystem::path &dir,
                           const SynthSpec &spec, std::uint64_t seed);

// The 5/3-speaker, 10/10-text plan matching the default synthetic layout.
SplitPlan default_synth_split(const SynthSpec &spec);

}  // namespace suprahmm

#endif  // SUPRAHMM_CORPUS_HPP_
