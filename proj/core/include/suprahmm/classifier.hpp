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

#ifndef SUPRAHMM_CLASSIFIER_HPP_
#define SUPRAHMM_CLASSIFIER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "suprahmm/corpus.hpp"
#include "suprahmm/hmm2.hpp"
#include "suprahmm/suprasegmental.hpp"

namespace suprahmm {

// One talking condition's reference models.  The segment-level model is
// optional; without it only acoustic-only (alpha = 0) scoring works.
struct ConditionModel {
  std::string label;
  Hmm2Model acoustic;
  std::optional<SuprasegmentalModel> suprasegmental;

  void validate() const;
};

struct ConditionBank {
  std::vector<ConditionModel> conditions;
  double alpha = 0.5;
  int sample_rate = 16000;
  MfccConfig mfcc;
  ProsodyConfig prosody;
  // Divide each stream's log-likelihood by its observation count before
  // fusing.  Off by default: raw log-likelihoods are fused.
  bool normalize_scores = false;

  bool has_suprasegmental() const;
  int condition_index(const std::string &label) const;
  void validate() const;
};

// Weighted combination of the two log-likelihood streams.  The unused
// stream at an endpoint is returned untouched, so alpha = 0 is exactly
// the acoustic score and alpha = 1 exactly the segment-level score.
double fuse_scores(double log_acoustic, double log_prosodic, double alpha);

// Both per-condition streams for one utterance.  `prosodic` is only
// meaningful when the bank carries segment-level models.
struct ScorePair {
  double acoustic = 0.0;
  double prosodic = 0.0;
};

// Scores the utterance against every condition.  Audio-backed utterances
// get their prosody from each candidate condition's own acoustic
// alignment; feature-backed utterances use their stored prosodic
// sequence.  With need_prosodic false the second stream is skipped.
std::vector<ScorePair> score_streams(const ConditionBank &bank,
                                     const LoadedUtterance &utterance,
                                     bool need_prosodic);

// Argmax of the fused score at the given alpha; ties break to the lowest
// condition index.
int classify_scores(const std::vector<ScorePair> &scores, double alpha);

struct Classification {
  int index = 0;
  std::string label;
  std::vector<double> fused;  // per condition, at the bank's alpha
};

Classification classify(const ConditionBank &bank,
                        const LoadedUtterance &utterance);

struct BankConfig {
  Topology topology{2, Shape::kCircular, 6};
  int mixtures = 10;
  bool use_suprasegmental = true;
  int supra_states = 2;
  int supra_mixtures = 2;
  double alpha = 0.5;
  TrainConfig train;
  TrainConfig supra_train;
  MfccConfig mfcc;
  ProsodyConfig prosody;
  bool normalize_scores = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Trains one acoustic model per condition, then (unless disabled) the
// segment-level model on top of each, using only the given records.
ConditionBank train_bank(const CorpusManifest &manifest,
                         const std::vector<UtteranceRecord> &records,
                         const BankConfig &config);

// Batch classification of a record list against a bank.
struct EvaluationRun {
  std::vector<std::string> ids;
  std::vector<int> truth;      // condition index per utterance
  std::vector<int> predicted;  // at the bank's alpha
  std::vector<std::vector<ScorePair>> scores;  // utterance x condition
};

EvaluationRun evaluate_bank(const ConditionBank &bank,
                            const CorpusManifest &manifest,
                            const std::vector<UtteranceRecord> &records,
                            bool need_prosodic, int threads = 1);

}  // namespace suprahmm

#endif  // SUPRAHMM_CLASSIFIER_HPP_
