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

#ifndef SUPRAHMM_SUPRASEGMENTAL_HPP_
#define SUPRAHMM_SUPRASEGMENTAL_HPP_

#include <cstdint>
#include <vector>

#include "suprahmm/hmm2.hpp"
#include "suprahmm/prosody.hpp"

namespace suprahmm {

// Assignment of acoustic states to coarse segment-level states.
struct StateMapping {
  int n_acoustic = 0;
  int n_supra = 0;
  std::vector<int> assignment;  // size n_acoustic, values in [0, n_supra)

  // Contiguous blocks; when counts do not divide evenly the earlier
  // blocks are one state larger.
  static StateMapping contiguous(int n_acoustic, int n_supra);

  int supra_of(int acoustic_state) const { return assignment[acoustic_state]; }
  void validate() const;
};

// One merged run of the mapped alignment.  Frame indices are half-open;
// sample ranges partition [0, sample_count).
struct SegmentSpan {
  int label = 0;
  int begin_frame = 0;
  int end_frame = 0;
  SampleRange samples;
};

struct SegmentSequence {
  std::vector<SegmentSpan> segments;
  int frame_count = 0;
  std::int64_t sample_count = 0;

  void validate() const;
  std::vector<SampleRange> sample_ranges() const;
};

// Segment-level layer on top of an acoustic model: the mapping plus an
// HMM over per-segment prosodic vectors.
struct SuprasegmentalModel {
  StateMapping mapping;
  Hmm2Model prosodic;

  void validate() const;
};

// Viterbi-aligns the observations, maps states through the mapping, and
// merges runs of equal labels.  Sample ranges place segment boundaries at
// frame starts; the final segment absorbs the analysis tail so the ranges
// partition the clip.  Pass total_samples < 0 to span exactly the frames.
SegmentSequence segment_by_alignment(const Hmm2Model &acoustic,
                                     const StateMapping &mapping,
                                     const FeatureSequence &obs,
                                     const FrameSpec &frame = {},
                                     int sample_rate = 16000,
                                     std::int64_t total_samples = -1);

// Segments the clip with the acoustic model and computes one prosodic
// vector per segment.
ProsodicSequence extract_prosody(const Hmm2Model &acoustic,
                                 const StateMapping &mapping,
                                 const AudioClip &clip,
                                 const FeatureSequence &obs,
                                 const FrameSpec &frame = {},
                                 const ProsodyConfig &prosody = {});

struct SupraTrainConfig {
  Topology topology{2, Shape::kCircular, 2};
  int mixtures = 2;
  TrainConfig train;
  std::uint64_t seed = 1;
};

// Fits the segment-level HMM to prosodic sequences that were produced by
// the per-condition acoustic alignment.
SuprasegmentalModel train_suprasegmental(
    const StateMapping &mapping,
    const std::vector<ProsodicSequence> &prosodic_corpus,
    const SupraTrainConfig &config);

FeatureSequence to_feature_sequence(const ProsodicSequence &prosody);

// Log-likelihood of an already-extracted prosodic sequence.
double score_prosodic(const SuprasegmentalModel &model,
                      const ProsodicSequence &prosody);

// Audio path: segmentation by the given acoustic model, then prosodic
// extraction, then the forward score.
double score_suprasegmental(const SuprasegmentalModel &model,
                            const Hmm2Model &acoustic, const AudioClip &clip,
                            const FeatureSequence &obs,
                            const FrameSpec &frame = {},
                            const ProsodyConfig &prosody = {});

}  // namespace suprahmm

#endif  // SUPRAHMM_SUPRASEGMENTAL_HPP_
