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

#include "suprahmm/classifier.hpp"

#include <cmath>
#include <map>

#include "suprahmm/error.hpp"
#include "suprahmm/numeric.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

void ConditionModel::validate() const {
  if (label.empty()) throw ConfigError("ConditionModel: empty label");
  acoustic.validate();
  if (suprasegmental) {
    suprasegmental->validate();
    if (suprasegmental->mapping.n_acoustic != acoustic.n_states()) {
      throw ConfigError("ConditionModel: mapping does not cover the acoustic "
                        "model (" + label + ")");
    }
  }
}

bool ConditionBank::has_suprasegmental() const {
  for (const ConditionModel &cond : conditions) {
    if (!cond.suprasegmental) return false;
  }
  return !conditions.empty();
}

int ConditionBank::condition_index(const std::string &label) const {
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (conditions[i].label == label) return static_cast<int>(i);
  }
  throw ConfigError("bank has no condition: " + label);
}

void ConditionBank::validate() const {
  if (conditions.empty()) throw ConfigError("ConditionBank: empty bank");
  if (alpha < 0.0 || alpha > 1.0) {
    throw ConfigError("ConditionBank: alpha outside [0, 1]");
  }
  if (sample_rate <= 0) throw ConfigError("ConditionBank: sample_rate <= 0");
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    conditions[i].validate();
    for (std::size_t j = i + 1; j < conditions.size(); ++j) {
      if (conditions[i].label == conditions[j].label) {
        throw ConfigError("ConditionBank: duplicate label " +
                          conditions[i].label);
      }
    }
  }
  if (alpha > 0.0 && !has_suprasegmental()) {
    throw ConfigError(
        "ConditionBank: alpha > 0 requires a segment-level model for every "
        "condition");
  }
}

double fuse_scores(double log_acoustic, double log_prosodic, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw ConfigError("fuse_scores: alpha outside [0, 1]");
  }
  if (alpha == 0.0) return log_acoustic;
  if (alpha == 1.0) return log_prosodic;
  return (1.0 - alpha) * log_acoustic + alpha * log_prosodic;
}

std::vector<ScorePair> score_streams(const ConditionBank &bank,
                                     const LoadedUtterance &utterance,
                                     bool need_prosodic) {
  if (bank.conditions.empty()) throw ConfigError("score_streams: empty bank");
  if (need_prosodic && !bank.has_suprasegmental()) {
    throw ConfigError(
        "score_streams: segment-level scores requested but the bank has no "
        "segment-level models");
  }
  if (need_prosodic && !utterance.clip && !utterance.prosody) {
    throw ConfigError(
        "utterance " + utterance.record.id +
        " has neither audio nor stored prosody; re-extract with audio kept "
        "or score with alpha = 0");
  }

  std::vector<ScorePair> out(bank.conditions.size());
  for (std::size_t c = 0; c < bank.conditions.size(); ++c) {
    const ConditionModel &cond = bank.conditions[c];
    out[c].acoustic = log_likelihood(cond.acoustic, utterance.features);
    if (bank.normalize_scores) {
      out[c].acoustic /= utterance.features.frame_count();
    }
    if (!need_prosodic) continue;
    ProsodicSequence pros;
    if (utterance.clip) {
      pros = extract_prosody(cond.acoustic, cond.suprasegmental->mapping,
                             *utterance.clip, utterance.features,
                             bank.mfcc.frame, bank.prosody);
    } else {
      pros = *utterance.prosody;
    }
    out[c].prosodic = score_prosodic(*cond.suprasegmental, pros);
    if (bank.normalize_scores) {
      out[c].prosodic /= pros.segment_count();
    }
  }
  return out;
}

int classify_scores(const std::vector<ScorePair> &scores, double alpha) {
  if (scores.empty()) throw ConfigError("classify_scores: no scores");
  int best = 0;
  double best_score = fuse_scores(scores[0].acoustic, scores[0].prosodic,
                                  alpha);
  for (std::size_t c = 1; c < scores.size(); ++c) {
    double fused = fuse_scores(scores[c].acoustic, scores[c].prosodic, alpha);
    if (fused > best_score) {
      best_score = fused;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Classification classify(const ConditionBank &bank,
                        const LoadedUtterance &utterance) {
  std::vector<ScorePair> scores =
      score_streams(bank, utterance, bank.alpha > 0.0);
  Classification out;
  out.index = classify_scores(scores, bank.alpha);
  out.label = bank.conditions[out.index].label;
  out.fused.reserve(scores.size());
  for (const ScorePair &pair : scores) {
    out.fused.push_back(fuse_scores(pair.acoustic, pair.prosodic, bank.alpha));
  }
  return out;
}

ConditionBank train_bank(const CorpusManifest &manifest,
                         const std::vector<UtteranceRecord> &records,
                         const BankConfig &config) {
  if (records.empty()) throw ConfigError("train_bank: no training records");
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw ConfigError("train_bank: alpha outside [0, 1]");
  }
  if (config.alpha > 0.0 && !config.use_suprasegmental) {
    throw ConfigError(
        "train_bank: alpha > 0 needs the segment-level layer enabled");
  }

  std::map<std::string, std::vector<const UtteranceRecord *>> by_condition;
  for (const UtteranceRecord &rec : records) {
    by_condition[rec.condition].push_back(&rec);
  }
  for (const std::string &label : manifest.conditions) {
    if (!by_condition.count(label)) {
      throw ConfigError("train_bank: condition " + label +
                        " has no training utterances");
    }
  }

  ConditionBank bank;
  bank.alpha = config.alpha;
  bank.sample_rate = manifest.sample_rate;
  bank.mfcc = config.mfcc;
  bank.prosody = config.prosody;
  bank.normalize_scores = config.normalize_scores;

  for (const std::string &label : manifest.conditions) {
    const auto &recs = by_condition[label];
    std::vector<LoadedUtterance> loaded(recs.size());
    parallel_for(recs.size(), config.threads, [&](std::size_t i) {
      loaded[i] = load_utterance(manifest, *recs[i], config.mfcc);
    });

    std::vector<FeatureSequence> features;
    features.reserve(loaded.size());
    for (const LoadedUtterance &utt : loaded) {
      features.push_back(utt.features);
    }

    ConditionModel cond;
    cond.label = label;
    TrainConfig acoustic_train = config.train;
    acoustic_train.threads = config.threads;
    Hmm2Model start = init_model_from_data(
        config.topology, config.mixtures,
        derive_seed(config.seed, "acoustic:" + label), features);
    cond.acoustic = train(start, features, acoustic_train);

    if (config.use_suprasegmental) {
      StateMapping mapping = StateMapping::contiguous(
          config.topology.n_states, config.supra_states);
      std::vector<ProsodicSequence> prosodic(loaded.size());
      parallel_for(loaded.size(), config.threads, [&](std::size_t i) {
        const LoadedUtterance &utt = loaded[i];
        if (utt.clip) {
          prosodic[i] =
              extract_prosody(cond.acoustic, mapping, *utt.clip, utt.features,
                              config.mfcc.frame, config.prosody);
        } else if (utt.prosody) {
          prosodic[i] = *utt.prosody;
        } else {
          throw ConfigError(
              "train_bank: utterance " + utt.record.id +
              " has neither audio nor stored prosody; re-extract with audio "
              "kept or train with the segment-level layer disabled");
        }
      });
      SupraTrainConfig supra;
      supra.topology = Topology{config.topology.order, config.topology.shape,
                                config.supra_states};
      supra.mixtures = config.supra_mixtures;
      supra.train = config.supra_train;
      supra.train.threads = config.threads;
      supra.seed = derive_seed(config.seed, "supra:" + label);
      cond.suprasegmental = train_suprasegmental(mapping, prosodic, supra);
    }
    bank.conditions.push_back(std::move(cond));
  }
  bank.validate();
  return bank;
}

EvaluationRun evaluate_bank(const ConditionBank &bank,
                            const CorpusManifest &manifest,
                            const std::vector<UtteranceRecord> &records,
                            bool need_prosodic, int threads) {
  bank.validate();
  if (records.empty()) throw ConfigError("evaluate_bank: no records");
  if (bank.alpha > 0.0) need_prosodic = true;

  EvaluationRun run;
  run.ids.resize(records.size());
  run.truth.resize(records.size());
  run.predicted.resize(records.size());
  run.scores.resize(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    LoadedUtterance utt = load_utterance(manifest, records[i], bank.mfcc);
    run.ids[i] = records[i].id;
    run.truth[i] = bank.condition_index(records[i].condition);
    run.scores[i] = score_streams(bank, utt, need_prosodic);
    run.predicted[i] = classify_scores(run.scores[i], bank.alpha);
  });
  return run;
}

}  // namespace suprahmm
