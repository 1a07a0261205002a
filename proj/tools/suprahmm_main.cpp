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

// Batch front end: synth, extract, train, evaluate.  Every subcommand is
// deterministic given its inputs and --seed, and exits 0 only when no
// record failed.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "suprahmm/audio.hpp"
#include "suprahmm/classifier.hpp"
#include "suprahmm/corpus.hpp"
#include "suprahmm/error.hpp"
#include "suprahmm/evaluation.hpp"
#include "suprahmm/features.hpp"
#include "suprahmm/model_io.hpp"
#include "suprahmm/numeric.hpp"
#include "suprahmm/rng.hpp"
#include "suprahmm/vq.hpp"

namespace fs = std::filesystem;
using namespace suprahmm;

namespace {

struct CommonOpts {
  std::string corpus;
  std::string split;
  std::string bank;
  std::string out;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ModelOpts {
  int order = 2;
  std::string shape = "circular";
  int states = 6;
  int supra_states = 2;
  int mixtures = 10;
  double alpha = 0.5;
  bool no_supra = false;
  bool normalize = false;
  int iters = 10;
  double tol = 1e-4;
};

Topology make_topology(const ModelOpts &opts) {
  Topology topo;
  topo.order = opts.order;
  topo.shape = shape_from_name(opts.shape);
  topo.n_states = opts.states;
  topo.validate();
  return topo;
}

std::string system_name(const ConditionBank &bank) {
  if (bank.conditions.empty()) return "empty";
  const auto &model = bank.conditions.front().acoustic;
  std::string name = "hmm" + std::to_string(model.topology.order) + "-" +
                     shape_name(model.topology.shape);
  if (bank.has_suprasegmental()) name += "-supra";
  return name;
}

std::vector<UtteranceRecord> select_records(const CorpusManifest &manifest,
                                            const std::string &split_path,
                                            bool want_train,
                                            std::vector<UtteranceRecord> *other) {
  if (split_path.empty()) {
    if (other != nullptr) other->clear();
    return manifest.records;
  }
  SplitPlan plan = load_split(split_path);
  auto [train_records, test_records] = split(manifest, plan);
  if (want_train) {
    if (other != nullptr) *other = test_records;
    return train_records;
  }
  if (other != nullptr) *other = train_records;
  return test_records;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
  CommonOpts common;
  SynthSpec spec;
  std::optional<double> separation;
};

int cmd_synth(const SynthOpts &opts) {
  SynthSpec spec = opts.spec;
  if (opts.separation.has_value()) {
    spec.acoustic_separation = *opts.separation;
    spec.prosodic_separation = *opts.separation;
  }
  fs::path dir(opts.common.out);
  SynthResult result = synth_generate(dir, spec, opts.common.seed);
  SplitPlan plan = default_synth_split(spec);
  save_split(dir / "split.plan", plan);
  auto [train_records, test_records] = split(result.manifest, plan);
  std::printf("wrote %zu records (%zu train / %zu test) to %s\n",
              result.manifest.records.size(), train_records.size(),
              test_records.size(), dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const CommonOpts &opts) {
  CorpusManifest manifest = load_manifest(opts.corpus);
  fs::path out_dir(opts.out);
  fs::create_directories(out_dir / "data");

  MfccConfig mfcc;
  CorpusManifest converted;
  converted.sample_rate = manifest.sample_rate;
  converted.conditions = manifest.conditions;
  converted.base_dir = out_dir;

  int failures = 0;
  for (const UtteranceRecord &record : manifest.records) {
    try {
      std::string feat_rel = "data/" + record.id + ".feat";
      if (record.kind == RecordKind::kAudio) {
        AudioClip clip = read_wav(manifest.base_dir / record.path);
        if (clip.sample_rate != manifest.sample_rate) {
          throw FormatError("sample rate mismatch in " + record.path);
        }
        FeatureSequence feats = mfcc_extract(clip, mfcc);
        feats.source_id = record.id;
        save_features(out_dir / feat_rel, feats);
      } else {
        FeatureSequence feats = load_features(manifest.base_dir / record.path);
        feats.source_id = record.id;
        save_features(out_dir / feat_rel, feats);
        fs::path pros_src = manifest.base_dir / record.path;
        pros_src.replace_extension(".pros");
        if (fs::exists(pros_src)) {
          ProsodicSequence pros = load_prosody(pros_src);
          pros.source_id = record.id;
          fs::path pros_dst = out_dir / feat_rel;
          pros_dst.replace_extension(".pros");
          save_prosody(pros_dst, pros);
        }
      }
      UtteranceRecord updated = record;
      updated.kind = RecordKind::kFeature;
      updated.path = feat_rel;
      converted.records.push_back(updated);
    } catch (const Error &err) {
      std::fprintf(stderr, "error: %s: %s\n", record.id.c_str(), err.what());
      ++failures;
    }
  }

  save_manifest(out_dir / "corpus.manifest", converted);
  std::printf("extracted %zu records to %s (%d failed)\n",
              converted.records.size(), out_dir.string().c_str(), failures);
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  CommonOpts common;
  ModelOpts model;
};

int cmd_train(const TrainOpts &opts) {
  CorpusManifest manifest = load_manifest(opts.common.corpus);
  std::vector<UtteranceRecord> records =
      select_records(manifest, opts.common.split, /*want_train=*/true, nullptr);

  BankConfig config;
  config.topology = make_topology(opts.model);
  config.mixtures = opts.model.mixtures;
  config.use_suprasegmental = !opts.model.no_supra;
  config.supra_states = opts.model.supra_states;
  config.supra_mixtures = 2;
  config.alpha = opts.model.no_supra ? 0.0 : opts.model.alpha;
  config.train.max_iters = opts.model.iters;
  config.train.tol = opts.model.tol;
  config.supra_train.max_iters = opts.model.iters;
  config.supra_train.tol = opts.model.tol;
  config.normalize_scores = opts.model.normalize;
  config.seed = opts.common.seed;
  config.threads = opts.common.threads;

  ConditionBank bank = train_bank(manifest, records, config);
  save_bank(opts.common.bank, bank);
  std::printf("trained %s bank (%zu conditions, %zu utterances) to %s\n",
              system_name(bank).c_str(), bank.conditions.size(), records.size(),
              opts.common.bank.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  CommonOpts common;
  std::optional<double> alpha;
  bool alpha_sweep = false;
  std::string baseline;
  int codebook_size = 64;
  std::string compare_bank;
};

struct ScoredSet {
  std::vector<std::string> ids;
  std::vector<int> truth;
  std::vector<int> predicted;
  std::vector<std::vector<ScorePair>> scores;
  int failures = 0;
};

// Scores every record against the bank, tolerating per-record failures so
// one bad file cannot sink a whole batch.
ScoredSet score_records(const ConditionBank &bank,
                        const CorpusManifest &manifest,
                        const std::vector<UtteranceRecord> &records,
                        bool need_prosodic, int threads) {
  const std::size_t n = records.size();
  std::vector<std::optional<std::vector<ScorePair>>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      LoadedUtterance utt =
          load_utterance(manifest, records[i], bank.mfcc);
      slots[i] = score_streams(bank, utt, need_prosodic);
    } catch (const Error &err) {
      errors[i] = err.what();
    }
  });

  ScoredSet set;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i].has_value()) {
      std::fprintf(stderr, "error: %s: %s\n", records[i].id.c_str(),
                   errors[i].c_str());
      ++set.failures;
      continue;
    }
    set.ids.push_back(records[i].id);
    set.truth.push_back(manifest.condition_index(records[i].condition));
    set.predicted.push_back(classify_scores(*slots[i], bank.alpha));
    set.scores.push_back(std::move(*slots[i]));
  }
  return set;
}

std::vector<std::string> bank_labels(const ConditionBank &bank) {
  std::vector<std::string> labels;
  labels.reserve(bank.conditions.size());
  for (const ConditionModel &condition : bank.conditions) {
    labels.push_back(condition.label);
  }
  return labels;
}

// Truth indices in score_records follow manifest condition order; the
// confusion matrix is built in bank order, so remap when they differ.
std::vector<int> to_bank_truth(const ConditionBank &bank,
                               const CorpusManifest &manifest,
                               const std::vector<int> &manifest_truth) {
  std::vector<int> remap(manifest.conditions.size());
  for (std::size_t c = 0; c < manifest.conditions.size(); ++c) {
    remap[c] = bank.condition_index(manifest.conditions[c]);
    if (remap[c] < 0) {
      throw ConfigError("bank has no model for condition '" +
                        manifest.conditions[c] + "'");
    }
  }
  std::vector<int> truth;
  truth.reserve(manifest_truth.size());
  for (int t : manifest_truth) truth.push_back(remap[t]);
  return truth;
}

std::vector<ComparisonRow> vq_comparison(
    const EvaluateOpts &opts, const ConditionBank &bank,
    const CorpusManifest &manifest,
    const std::vector<UtteranceRecord> &train_records,
    const std::vector<UtteranceRecord> &test_records,
    const PerformanceTable &main_table, int *failures) {
  if (train_records.empty()) {
    throw ConfigError("--baseline vq needs --split to supply training data");
  }

  std::vector<std::string> labels = bank_labels(bank);
  std::vector<Codebook> codebooks;
  for (const std::string &label : labels) {
    FeatureSequence pooled;
    pooled.dim = 0;
    for (const UtteranceRecord &record : train_records) {
      if (record.condition != label) continue;
      LoadedUtterance utt =
          load_utterance(manifest, record, bank.mfcc);
      if (pooled.dim == 0) pooled.dim = utt.features.dim;
      pooled.data.insert(pooled.data.end(), utt.features.data.begin(),
                         utt.features.data.end());
    }
    pooled.source_id = label;
    pooled.validate();
    std::uint64_t seed = derive_seed(opts.common.seed, "vq:" + label);
    codebooks.push_back(
        train_codebook(pooled, opts.codebook_size, seed));
    codebooks.back().label = label;
  }

  const std::size_t n = test_records.size();
  std::vector<int> predicted(n, -1);
  std::vector<std::string> errors(n);
  parallel_for(n, opts.common.threads, [&](std::size_t i) {
    try {
      LoadedUtterance utt =
          load_utterance(manifest, test_records[i], bank.mfcc);
      predicted[i] = vq_classify(codebooks, utt.features);
    } catch (const Error &err) {
      errors[i] = err.what();
    }
  });

  std::vector<int> truth;
  std::vector<int> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (predicted[i] < 0) {
      std::fprintf(stderr, "error: %s: %s\n", test_records[i].id.c_str(),
                   errors[i].c_str());
      ++*failures;
      continue;
    }
    int label_index = bank.condition_index(test_records[i].condition);
    truth.push_back(label_index);
    kept.push_back(predicted[i]);
  }

  ConfusionMatrix vq_matrix = confusion_matrix(labels, truth, kept);
  std::vector<ComparisonRow> rows;
  rows.push_back({system_name(bank), main_table});
  rows.push_back({"vq-" + std::to_string(opts.codebook_size),
                  performance_table(vq_matrix)});
  return rows;
}

int cmd_evaluate(const EvaluateOpts &opts) {
  CorpusManifest manifest = load_manifest(opts.common.corpus);
  ConditionBank bank = load_bank(opts.common.bank);
  if (opts.alpha.has_value()) {
    bank.alpha = *opts.alpha;
    bank.validate();
  }

  std::vector<UtteranceRecord> train_records;
  std::vector<UtteranceRecord> test_records = select_records(
      manifest, opts.common.split, /*want_train=*/false, &train_records);

  bool need_prosodic =
      bank.has_suprasegmental() && (bank.alpha > 0.0 || opts.alpha_sweep);
  ScoredSet set = score_records(bank, manifest, test_records, need_prosodic,
                                opts.common.threads);
  int failures = set.failures;
  if (set.ids.empty()) {
    std::fprintf(stderr, "error: no record could be scored\n");
    return 1;
  }

  std::vector<std::string> labels = bank_labels(bank);
  std::vector<int> truth = to_bank_truth(bank, manifest, set.truth);
  ConfusionMatrix matrix = confusion_matrix(labels, truth, set.predicted);
  PerformanceTable table = performance_table(matrix);

  fs::path out_dir(opts.common.out);
  fs::create_directories(out_dir);
  write_confusion_csv(out_dir / "confusion.csv", matrix);
  write_performance_csv(out_dir / "performance.csv", table);

  ReportContent report;
  report.confusion = matrix;
  report.performance = table;

  if (opts.alpha_sweep) {
    report.sweep =
        alpha_sweep(set.scores, truth, labels, default_alpha_grid());
    write_sweep_csv(out_dir / "sweep.csv", report.sweep, labels);
  }

  if (opts.baseline == "vq") {
    report.comparisons = vq_comparison(opts, bank, manifest, train_records,
                                       test_records, table, &failures);
    write_comparison_csv(out_dir / "comparison.csv", report.comparisons);
  }

  if (!opts.compare_bank.empty()) {
    ConditionBank other = load_bank(opts.compare_bank);
    bool other_prosodic = other.has_suprasegmental() && other.alpha > 0.0;
    ScoredSet other_set = score_records(other, manifest, test_records,
                                        other_prosodic, opts.common.threads);
    failures += other_set.failures;
    std::vector<int> other_truth = to_bank_truth(other, manifest,
                                                 other_set.truth);
    ConfusionMatrix other_matrix =
        confusion_matrix(bank_labels(other), other_truth, other_set.predicted);
    PerformanceTable other_table = performance_table(other_matrix);
    TTestResult ttest =
        t_test(table.average, other_table.average,
               sample_sd(table.per_condition),
               sample_sd(other_table.per_condition));
    std::string pair_name = system_name(bank) + " vs " + system_name(other);
    report.ttests.push_back({pair_name, ttest});
    write_ttest_csv(out_dir / "ttest.csv", report.ttests);
  }

  write_report(out_dir / "report.txt", report);
  std::printf("%s: average %.1f%% over %zu utterances (%d failed)\n",
              system_name(bank).c_str(), round_tenth(table.average),
              set.ids.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Talking-condition classification pipeline"};
  app.require_subcommand(1);

  SynthOpts synth_opts;
  CLI::App *synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("--out", synth_opts.common.out, "Output corpus directory")
      ->required();
  synth_cmd->add_option("--seed", synth_opts.common.seed, "Master random seed");
  synth_cmd->add_option("--conditions", synth_opts.spec.n_conditions,
                        "Number of talking conditions");
  synth_cmd->add_option("--speakers", synth_opts.spec.speakers, "Speaker count");
  synth_cmd->add_option("--texts", synth_opts.spec.texts, "Distinct text count");
  synth_cmd->add_option("--reps", synth_opts.spec.reps,
                        "Repetitions per speaker/text pair");
  synth_cmd->add_option("--states", synth_opts.spec.states,
                        "Generator state count");
  synth_cmd->add_option("--supra-states", synth_opts.spec.supra_states,
                        "Generator segment-level state count");
  synth_cmd->add_option("--acoustic-separation",
                        synth_opts.spec.acoustic_separation,
                        "Frame-level mean shift between conditions");
  synth_cmd->add_option("--prosodic-separation",
                        synth_opts.spec.prosodic_separation,
                        "Segment-level mean shift between conditions");
  double separation_value = 0.0;
  CLI::Option *separation_opt = synth_cmd->add_option(
      "--separation", separation_value, "Set both separations at once");

  CommonOpts extract_opts;
  CLI::App *extract_cmd = app.add_subcommand(
      "extract", "Convert corpus audio to stored feature files");
  extract_cmd->add_option("--corpus", extract_opts.corpus, "Corpus manifest")
      ->required();
  extract_cmd->add_option("--out", extract_opts.out, "Output corpus directory")
      ->required();

  TrainOpts train_opts;
  CLI::App *train_cmd =
      app.add_subcommand("train", "Train one reference model per condition");
  train_cmd->add_option("--corpus", train_opts.common.corpus, "Corpus manifest")
      ->required();
  train_cmd->add_option("--split", train_opts.common.split,
                        "Split plan (training side is used)");
  train_cmd->add_option("--bank", train_opts.common.bank,
                        "Output bank directory")
      ->required();
  train_cmd->add_option("--order", train_opts.model.order, "Chain order")
      ->check(CLI::IsMember({1, 2}));
  train_cmd->add_option("--shape", train_opts.model.shape, "State topology")
      ->check(CLI::IsMember({"linear", "circular"}));
  train_cmd->add_option("--states", train_opts.model.states,
                        "Acoustic state count");
  train_cmd->add_option("--supra-states", train_opts.model.supra_states,
                        "Segment-level state count");
  train_cmd->add_option("--mixtures", train_opts.model.mixtures,
                        "Gaussian mixtures per state");
  train_cmd->add_option("--alpha", train_opts.model.alpha,
                        "Acoustic/segment fusion weight in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_flag("--no-supra", train_opts.model.no_supra,
                      "Skip the segment-level layer");
  train_cmd->add_flag("--normalize", train_opts.model.normalize,
                      "Normalize stream scores by observation count");
  train_cmd->add_option("--iters", train_opts.model.iters,
                        "Max training iterations");
  train_cmd->add_option("--tol", train_opts.model.tol,
                        "Relative log-likelihood stopping gain");
  train_cmd->add_option("--seed", train_opts.common.seed, "Master random seed");
  train_cmd->add_option("--threads", train_opts.common.threads,
                        "Worker threads (0 = all cores)");

  EvaluateOpts eval_opts;
  CLI::App *eval_cmd =
      app.add_subcommand("evaluate", "Classify a test set and write reports");
  eval_cmd->add_option("--corpus", eval_opts.common.corpus, "Corpus manifest")
      ->required();
  eval_cmd->add_option("--split", eval_opts.common.split,
                       "Split plan (test side is scored)");
  eval_cmd->add_option("--bank", eval_opts.common.bank, "Bank directory")
      ->required();
  eval_cmd->add_option("--out", eval_opts.common.out, "Report directory")
      ->required();
  double eval_alpha = 0.0;
  CLI::Option *eval_alpha_opt =
      eval_cmd->add_option("--alpha", eval_alpha, "Override the bank's alpha")
          ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_flag("--alpha-sweep", eval_opts.alpha_sweep,
                     "Also re-fuse scores over the 0.0..1.0 alpha grid");
  eval_cmd->add_option("--baseline", eval_opts.baseline,
                       "Add a baseline comparison row")
      ->check(CLI::IsMember({"vq"}));
  eval_cmd->add_option("--codebook-size", eval_opts.codebook_size,
                       "Centroids per baseline codebook");
  eval_cmd->add_option("--compare-bank", eval_opts.compare_bank,
                       "Second bank for a significance test");
  eval_cmd->add_option("--seed", eval_opts.common.seed, "Master random seed");
  eval_cmd->add_option("--threads", eval_opts.common.threads,
                       "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      if (separation_opt->count() > 0) {
        synth_opts.separation = separation_value;
      }
      return cmd_synth(synth_opts);
    }
    if (extract_cmd->parsed()) return cmd_extract(extract_opts);
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (eval_cmd->parsed()) {
      if (eval_alpha_opt->count() > 0) eval_opts.alpha = eval_alpha;
      return cmd_evaluate(eval_opts);
    }
  } catch (const Error &err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  } catch (const std::exception &err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
