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

#include "suprahmm/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "suprahmm/error.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

const std::vector<std::string> kDefaultConditions = {
    "neutral", "angry", "slow", "loud", "soft", "fast"};

std::string record_kind_name(RecordKind kind) {
  return kind == RecordKind::kAudio ? "audio" : "feature";
}

RecordKind record_kind_from_name(const std::string &name) {
  if (name == "audio") return RecordKind::kAudio;
  if (name == "feature") return RecordKind::kFeature;
  throw FormatError("unknown record kind: " + name);
}

int CorpusManifest::condition_index(const std::string &label) const {
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i] == label) return static_cast<int>(i);
  }
  throw ConfigError("unknown condition: " + label);
}

void CorpusManifest::validate() const {
  if (sample_rate <= 0) throw ConfigError("manifest: sample_rate <= 0");
  if (conditions.empty()) throw ConfigError("manifest: no conditions");
  std::unordered_set<std::string> declared(conditions.begin(),
                                           conditions.end());
  if (declared.size() != conditions.size()) {
    throw ConfigError("manifest: duplicate condition label");
  }
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> seen_conditions;
  for (const UtteranceRecord &rec : records) {
    if (rec.id.empty() || rec.speaker.empty() || rec.text.empty() ||
        rec.path.empty()) {
      throw ConfigError("manifest: record with empty field");
    }
    if (!declared.count(rec.condition)) {
      throw ConfigError("manifest: record " + rec.id +
                        " has undeclared condition " + rec.condition);
    }
    if (!ids.insert(rec.id).second) {
      throw ConfigError("manifest: duplicate utterance id " + rec.id);
    }
    seen_conditions.insert(rec.condition);
  }
  for (const std::string &label : conditions) {
    if (!seen_conditions.count(label)) {
      throw ConfigError("manifest: condition " + label + " has no records");
    }
  }
}

CorpusManifest load_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "suprahmm-corpus v1") {
    throw FormatError("bad manifest header: " + path.string());
  }
  CorpusManifest out;
  out.base_dir = path.parent_path();
  out.sample_rate = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line.rfind("sample_rate", 0) == 0) {
      std::string key;
      ls >> key >> out.sample_rate;
      if (ls.fail()) throw FormatError("bad sample_rate line in manifest");
      continue;
    }
    if (line.rfind("conditions", 0) == 0) {
      std::string key, label;
      ls >> key;
      while (ls >> label) out.conditions.push_back(label);
      continue;
    }
    UtteranceRecord rec;
    std::string field;
    std::istringstream ts(line);
    std::vector<std::string> fields;
    while (std::getline(ts, field, '\t')) fields.push_back(field);
    if (fields.size() != 7) {
      throw FormatError("manifest record needs 7 tab-separated fields: " +
                        line);
    }
    rec.id = fields[0];
    rec.speaker = fields[1];
    rec.text = fields[2];
    rec.condition = fields[3];
    try {
      rec.rep = std::stoi(fields[4]);
    } catch (const std::exception &) {
      throw FormatError("bad repetition index in manifest record " + rec.id);
    }
    rec.path = fields[5];
    rec.kind = record_kind_from_name(fields[6]);
    out.records.push_back(std::move(rec));
  }
  out.validate();
  return out;
}

void save_manifest(const std::filesystem::path &path,
                   const CorpusManifest &manifest) {
  manifest.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << "suprahmm-corpus v1\n";
  out << "sample_rate " << manifest.sample_rate << "\n";
  out << "conditions";
  for (const std::string &label : manifest.conditions) out << " " << label;
  out << "\n";
  for (const UtteranceRecord &rec : manifest.records) {
    out << rec.id << "\t" << rec.speaker << "\t" << rec.text << "\t"
        << rec.condition << "\t" << rec.rep << "\t" << rec.path << "\t"
        << record_kind_name(rec.kind) << "\n";
  }
  if (!out) throw IoError("short write to manifest: " + path.string());
}

void SplitPlan::validate() const {
  if (train_speakers.empty() || test_speakers.empty() ||
      train_texts.empty() || test_texts.empty()) {
    throw ConfigError("split plan: every set must be non-empty");
  }
  for (const std::string &s : train_speakers) {
    if (test_speakers.count(s)) {
      throw ConfigError("split plan: speaker " + s + " on both sides");
    }
  }
  for (const std::string &t : train_texts) {
    if (test_texts.count(t)) {
      throw ConfigError("split plan: text " + t + " on both sides");
    }
  }
}

namespace {

void write_set(std::ofstream &out, const std::string &key,
               const std::set<std::string> &values) {
  out << key;
  for (const std::string &v : values) out << " " << v;
  out << "\n";
}

}  // namespace

SplitPlan load_split(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split plan: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "suprahmm-split v1") {
    throw FormatError("bad split plan header: " + path.string());
  }
  SplitPlan out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key;
    std::set<std::string> *target = nullptr;
    if (key == "train_speakers") target = &out.train_speakers;
    else if (key == "test_speakers") target = &out.test_speakers;
    else if (key == "train_texts") target = &out.train_texts;
    else if (key == "test_texts") target = &out.test_texts;
    else throw FormatError("unknown split plan key: " + key);
    while (ls >> value) target->insert(value);
  }
  out.validate();
  return out;
}

void save_split(const std::filesystem::path &path, const SplitPlan &plan) {
  plan.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write split plan: " + path.string());
  out << "suprahmm-split v1\n";
  write_set(out, "train_speakers", plan.train_speakers);
  write_set(out, "test_speakers", plan.test_speakers);
  write_set(out, "train_texts", plan.train_texts);
  write_set(out, "test_texts", plan.test_texts);
  if (!out) throw IoError("short write to split plan: " + path.string());
}

std::pair<std::vector<UtteranceRecord>, std::vector<UtteranceRecord>> split(
    const CorpusManifest &manifest, const SplitPlan &plan) {
  plan.validate();
  std::unordered_set<std::string> speakers, texts;
  for (const UtteranceRecord &rec : manifest.records) {
    speakers.insert(rec.speaker);
    texts.insert(rec.text);
  }
  auto check = [](const std::unordered_set<std::string> &known,
                  const std::set<std::string> &wanted,
                  const std::string &what) {
    for (const std::string &v : wanted) {
      if (!known.count(v)) {
        throw ConfigError("split plan names unknown " + what + ": " + v);
      }
    }
  };
  check(speakers, plan.train_speakers, "speaker");
  check(speakers, plan.test_speakers, "speaker");
  check(texts, plan.train_texts, "text");
  check(texts, plan.test_texts, "text");

  std::pair<std::vector<UtteranceRecord>, std::vector<UtteranceRecord>> out;
  for (const UtteranceRecord &rec : manifest.records) {
    if (plan.train_speakers.count(rec.speaker) &&
        plan.train_texts.count(rec.text)) {
      out.first.push_back(rec);
    } else if (plan.test_speakers.count(rec.speaker) &&
               plan.test_texts.count(rec.text)) {
      out.second.push_back(rec);
    }
  }
  if (out.first.empty()) throw ConfigError("split: empty training side");
  if (out.second.empty()) throw ConfigError("split: empty test side");
  return out;
}

LoadedUtterance load_utterance(const CorpusManifest &manifest,
                               const UtteranceRecord &record,
                               const MfccConfig &mfcc) {
  LoadedUtterance out;
  out.record = record;
  const std::filesystem::path full = manifest.base_dir / record.path;
  if (record.kind == RecordKind::kAudio) {
    AudioClip clip = read_wav(full);
    if (clip.sample_rate != manifest.sample_rate) {
      throw FormatError("record " + record.id + " sampled at " +
                        std::to_string(clip.sample_rate) +
                        " Hz, manifest declares " +
                        std::to_string(manifest.sample_rate));
    }
    out.features = mfcc_extract(clip, mfcc);
    out.features.source_id = record.id;
    out.clip = std::move(clip);
  } else {
    out.features = load_features(full);
    out.features.source_id = record.id;
    std::filesystem::path pros = full;
    pros.replace_extension(".pros");
    if (std::filesystem::exists(pros)) {
      out.prosody = load_prosody(pros);
      out.prosody->source_id = record.id;
    }
  }
  return out;
}

void SynthSpec::validate() const {
  if (n_conditions < 2) throw ConfigError("SynthSpec: n_conditions < 2");
  if (acoustic_separation < 0.0 || prosodic_separation < 0.0) {
    throw ConfigError("SynthSpec: separation < 0");
  }
  if (speakers < 2 || texts < 2 || reps < 1) {
    throw ConfigError("SynthSpec: need >= 2 speakers, >= 2 texts, >= 1 rep");
  }
  if (min_frames < 3 || max_frames < min_frames) {
    throw ConfigError("SynthSpec: bad frame-count range");
  }
  if (min_segments < 1 || max_segments < min_segments) {
    throw ConfigError("SynthSpec: bad segment-count range");
  }
  if (dim < 1 || prosodic_dim < 1) throw ConfigError("SynthSpec: bad dims");
  if (states < 2 || supra_states < 2) {
    throw ConfigError("SynthSpec: need >= 2 states per layer");
  }
  if (sample_rate <= 0) throw ConfigError("SynthSpec: sample_rate <= 0");
}

namespace {

std::vector<std::string> condition_labels(int n) {
  if (n == static_cast<int>(kDefaultConditions.size())) {
    return kDefaultConditions;
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back("cond" + std::to_string(i));
  return out;
}

// Seeded unit vector scaled by `separation`, added to every mixture mean
// so conditions differ by a rigid shift of the generator.
void shift_means(Hmm2Model &model, double separation, std::uint64_t seed) {
  if (separation == 0.0) return;
  const int dim = model.dim();
  Rng rng(seed);
  std::vector<double> direction(dim);
  double norm = 0.0;
  for (double &d : direction) {
    d = rng.normal();
    norm += d * d;
  }
  norm = std::sqrt(norm);
  for (double &d : direction) d = d / norm * separation;
  for (GmmEmission &gmm : model.emissions) {
    for (int m = 0; m < gmm.mixtures(); ++m) {
      for (int d = 0; d < dim; ++d) {
        gmm.means[static_cast<std::size_t>(m) * dim + d] += direction[d];
      }
    }
  }
}

}  // namespace

SynthResult synth_generate(const std::filesystem::path &dir,
                           const SynthSpec &spec, std::uint64_t seed) {
  spec.validate();
  std::filesystem::create_directories(dir / "data");

  const std::vector<std::string> labels = condition_labels(spec.n_conditions);
  const Topology acoustic_topology{2, Shape::kCircular, spec.states};
  const Topology prosodic_topology{2, Shape::kCircular, spec.supra_states};

  SynthResult out;
  for (int c = 0; c < spec.n_conditions; ++c) {
    Hmm2Model acoustic = init_model(acoustic_topology, spec.dim, 1,
                                    derive_seed(seed, "acoustic-base"));
    shift_means(acoustic, spec.acoustic_separation,
                derive_seed(seed, "acoustic-shift-" + labels[c]));
    Hmm2Model prosodic = init_model(prosodic_topology, spec.prosodic_dim, 1,
                                    derive_seed(seed, "prosodic-base"));
    shift_means(prosodic, spec.prosodic_separation,
                derive_seed(seed, "prosodic-shift-" + labels[c]));
    out.acoustic_truth.push_back(std::move(acoustic));
    out.prosodic_truth.push_back(std::move(prosodic));
  }

  CorpusManifest &manifest = out.manifest;
  manifest.sample_rate = spec.sample_rate;
  manifest.conditions = labels;
  manifest.base_dir = dir;

  for (int c = 0; c < spec.n_conditions; ++c) {
    for (int s = 0; s < spec.speakers; ++s) {
      for (int x = 0; x < spec.texts; ++x) {
        for (int r = 1; r <= spec.reps; ++r) {
          UtteranceRecord rec;
          rec.speaker = "spk" + std::to_string(s);
          rec.text = "txt" + std::to_string(x);
          rec.condition = labels[c];
          rec.rep = r;
          rec.id = labels[c] + "-" + rec.speaker + "-" + rec.text + "-r" +
                   std::to_string(r);
          rec.path = "data/" + rec.id + ".feat";
          rec.kind = RecordKind::kFeature;

          Rng shape_rng(derive_seed(seed, "shape-" + rec.id));
          const int frames =
              spec.min_frames + static_cast<int>(shape_rng.index(
                                    spec.max_frames - spec.min_frames + 1));
          const int segments =
              spec.min_segments + static_cast<int>(shape_rng.index(
                                      spec.max_segments - spec.min_segments +
                                      1));

          SampledSequence feat = sample_sequence(
              out.acoustic_truth[c], frames, derive_seed(seed, "feat-" + rec.id));
          feat.observations.source_id = rec.id;
          save_features(dir / rec.path, feat.observations);

          SampledSequence pros = sample_sequence(
              out.prosodic_truth[c], segments,
              derive_seed(seed, "pros-" + rec.id));
          ProsodicSequence stored;
          stored.dim = spec.prosodic_dim;
          stored.data = std::move(pros.observations.data);
          stored.source_id = rec.id;
          save_prosody(dir / "data" / (rec.id + ".pros"), stored);

          manifest.records.push_back(std::move(rec));
        }
      }
    }
  }
  save_manifest(dir / "corpus.manifest", manifest);
  return out;
}

SplitPlan default_synth_split(const SynthSpec &spec) {
  SplitPlan plan;
  const int test_speakers = std::max(1, spec.speakers * 3 / 8);
  const int train_speakers = spec.speakers - test_speakers;
  for (int s = 0; s < spec.speakers; ++s) {
    std::string id = "spk" + std::to_string(s);
    if (s < train_speakers) {
      plan.train_speakers.insert(id);
    } else {
      plan.test_speakers.insert(id);
    }
  }
  const int train_texts = spec.texts / 2;
  for (int x = 0; x < spec.texts; ++x) {
    std::string id = "txt" + std::to_string(x);
    if (x < train_texts) {
      plan.train_texts.insert(id);
    } else {
      plan.test_texts.insert(id);
    }
  }
  plan.validate();
  return plan;
}

}  // namespace suprahmm
