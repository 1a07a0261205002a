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

#include "suprahmm/suprasegmental.hpp"

#include <string>

#include "suprahmm/error.hpp"

namespace suprahmm {

StateMapping StateMapping::contiguous(int n_acoustic, int n_supra) {
  if (n_acoustic < 1 || n_supra < 1 || n_supra > n_acoustic) {
    throw ConfigError("StateMapping: need 1 <= n_supra <= n_acoustic");
  }
  StateMapping out;
  out.n_acoustic = n_acoustic;
  out.n_supra = n_supra;
  out.assignment.reserve(n_acoustic);
  const int base = n_acoustic / n_supra;
  const int extra = n_acoustic % n_supra;
  for (int s = 0; s < n_supra; ++s) {
    const int block = base + (s < extra ? 1 : 0);
    for (int i = 0; i < block; ++i) out.assignment.push_back(s);
  }
  return out;
}

void StateMapping::validate() const {
  if (n_acoustic < 1 || n_supra < 1) {
    throw ConfigError("StateMapping: empty mapping");
  }
  if (static_cast<int>(assignment.size()) != n_acoustic) {
    throw ConfigError("StateMapping: assignment size mismatch");
  }
  std::vector<int> seen(n_supra, 0);
  for (int s : assignment) {
    if (s < 0 || s >= n_supra) {
      throw ConfigError("StateMapping: label out of range");
    }
    ++seen[s];
  }
  for (int count : seen) {
    if (count == 0) {
      throw ConfigError("StateMapping: unused suprasegmental state");
    }
  }
}

void SegmentSequence::validate() const {
  if (segments.empty()) throw ConfigError("SegmentSequence: no segments");
  int frame_cursor = 0;
  std::int64_t sample_cursor = 0;
  int last_label = -1;
  for (const SegmentSpan &seg : segments) {
    if (seg.begin_frame != frame_cursor || seg.end_frame <= seg.begin_frame) {
      throw ConfigError("SegmentSequence: frames do not partition");
    }
    if (seg.samples.begin != sample_cursor ||
        seg.samples.end <= seg.samples.begin) {
      throw ConfigError("SegmentSequence: samples do not partition");
    }
    if (seg.label == last_label) {
      throw ConfigError("SegmentSequence: adjacent equal labels not merged");
    }
    frame_cursor = seg.end_frame;
    sample_cursor = seg.samples.end;
    last_label = seg.label;
  }
  if (frame_cursor != frame_count || sample_cursor != sample_count) {
    throw ConfigError("SegmentSequence: totals do not match");
  }
}

std::vector<SampleRange> SegmentSequence::sample_ranges() const {
  std::vector<SampleRange> out;
  out.reserve(segments.size());
  for (const SegmentSpan &seg : segments) out.push_back(seg.samples);
  return out;
}

void SuprasegmentalModel::validate() const {
  mapping.validate();
  prosodic.validate();
  if (prosodic.n_states() != mapping.n_supra) {
    throw ConfigError(
        "SuprasegmentalModel: prosodic state count does not match mapping");
  }
}

SegmentSequence segment_by_alignment(const Hmm2Model &acoustic,
                                     const StateMapping &mapping,
                                     const FeatureSequence &obs,
                                     const FrameSpec &frame, int sample_rate,
                                     std::int64_t total_samples) {
  mapping.validate();
  if (mapping.n_acoustic != acoustic.n_states()) {
    throw ConfigError("segment_by_alignment: mapping does not cover model");
  }
  const int hop = frame.hop_samples(sample_rate);
  const int frame_len = frame.frame_samples(sample_rate);
  ViterbiResult alignment = viterbi_align(acoustic, obs);
  const int T = static_cast<int>(alignment.path.size());
  if (total_samples < 0) {
    total_samples = static_cast<std::int64_t>(T - 1) * hop + frame_len;
  }

  SegmentSequence out;
  out.frame_count = T;
  out.sample_count = total_samples;
  int run_start = 0;
  int run_label = mapping.supra_of(alignment.path[0]);
  for (int t = 1; t <= T; ++t) {
    int label = t < T ? mapping.supra_of(alignment.path[t]) : -1;
    if (t == T || label != run_label) {
      SegmentSpan seg;
      seg.label = run_label;
      seg.begin_frame = run_start;
      seg.end_frame = t;
      seg.samples.begin = static_cast<std::int64_t>(run_start) * hop;
      seg.samples.end =
          t == T ? total_samples : static_cast<std::int64_t>(t) * hop;
      out.segments.push_back(seg);
      run_start = t;
      run_label = label;
    }
  }
  out.validate();
  return out;
}

ProsodicSequence extract_prosody(const Hmm2Model &acoustic,
                                 const StateMapping &mapping,
                                 const AudioClip &clip,
                                 const FeatureSequence &obs,
                                 const FrameSpec &frame,
                                 const ProsodyConfig &prosody) {
  SegmentSequence segments = segment_by_alignment(
      acoustic, mapping, obs, frame, clip.sample_rate, clip.length());
  ProsodicSequence out =
      prosodic_extract(clip, segments.sample_ranges(), prosody);
  out.source_id = obs.source_id;
  return out;
}

SuprasegmentalModel train_suprasegmental(
    const StateMapping &mapping,
    const std::vector<ProsodicSequence> &prosodic_corpus,
    const SupraTrainConfig &config) {
  mapping.validate();
  if (prosodic_corpus.empty()) {
    throw ConfigError("train_suprasegmental: empty corpus");
  }
  if (config.topology.n_states != mapping.n_supra) {
    throw ConfigError(
        "train_suprasegmental: topology size does not match mapping");
  }
  std::vector<FeatureSequence> sequences;
  sequences.reserve(prosodic_corpus.size());
  for (const ProsodicSequence &pros : prosodic_corpus) {
    sequences.push_back(to_feature_sequence(pros));
  }
  Hmm2Model seed_model = init_model_from_data(config.topology, config.mixtures,
                                              config.seed, sequences);
  SuprasegmentalModel out;
  out.mapping = mapping;
  out.prosodic = train(seed_model, sequences, config.train);
  out.validate();
  return out;
}

FeatureSequence to_feature_sequence(const ProsodicSequence &prosody) {
  prosody.validate();
  FeatureSequence out;
  out.dim = prosody.dim;
  out.data = prosody.data;
  out.source_id = prosody.source_id;
  return out;
}

double score_prosodic(const SuprasegmentalModel &model,
                      const ProsodicSequence &prosody) {
  return log_likelihood(model.prosodic, to_feature_sequence(prosody));
}

double score_suprasegmental(const SuprasegmentalModel &model,
                            const Hmm2Model &acoustic, const AudioClip &clip,
                            const FeatureSequence &obs, const FrameSpec &frame,
                            const ProsodyConfig &prosody) {
  ProsodicSequence pros =
      extract_prosody(acoustic, model.mapping, clip, obs, frame, prosody);
  return score_prosodic(model, pros);
}

}  // namespace suprahmm
