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

// Microbenchmarks for the scoring and front-end hot paths.

#include <benchmark/benchmark.h>

#include <vector>

#include "suprahmm/features.hpp"
#include "suprahmm/gmm.hpp"
#include "suprahmm/hmm2.hpp"
#include "suprahmm/rng.hpp"

namespace {

using namespace suprahmm;

Hmm2Model bench_model(int order, Shape shape, int n) {
  Topology topo{order, shape, n};
  return init_model(topo, 32, 4, 42);
}

FeatureSequence bench_sequence(int t, int dim) {
  Rng rng(7);
  FeatureSequence seq;
  seq.dim = dim;
  seq.data.reserve(static_cast<std::size_t>(t) * dim);
  for (int i = 0; i < t * dim; ++i) seq.data.push_back(rng.normal());
  return seq;
}

AudioClip bench_clip(int samples) {
  Rng rng(11);
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    clip.samples.push_back(4000.0 * rng.normal());
  }
  return clip;
}

void BM_Forward(benchmark::State &state) {
  int order = static_cast<int>(state.range(0));
  Shape shape = state.range(1) == 0 ? Shape::kLinear : Shape::kCircular;
  Hmm2Model model = bench_model(order, shape, 6);
  FeatureSequence obs = bench_sequence(50, 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(model, obs).log_likelihood);
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_Forward)
    ->ArgNames({"order", "circular"})
    ->Args({1, 0})
    ->Args({1, 1})
    ->Args({2, 0})
    ->Args({2, 1});

void BM_Viterbi(benchmark::State &state) {
  int order = static_cast<int>(state.range(0));
  Shape shape = state.range(1) == 0 ? Shape::kLinear : Shape::kCircular;
  Hmm2Model model = bench_model(order, shape, 6);
  FeatureSequence obs = bench_sequence(50, 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(viterbi_align(model, obs).log_score);
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_Viterbi)
    ->ArgNames({"order", "circular"})
    ->Args({1, 0})
    ->Args({1, 1})
    ->Args({2, 0})
    ->Args({2, 1});

void BM_MfccExtract(benchmark::State &state) {
  AudioClip clip = bench_clip(static_cast<int>(state.range(0)));
  MfccConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfcc_extract(clip, config).frame_count());
  }
  state.SetItemsProcessed(state.iterations() * clip.samples.size());
}
BENCHMARK(BM_MfccExtract)->ArgName("samples")->Arg(16000)->Arg(48000);

void BM_GmmLogDensity(benchmark::State &state) {
  Hmm2Model model = bench_model(2, Shape::kCircular, 6);
  const GmmEmission &gmm = model.emissions[0];
  FeatureSequence obs = bench_sequence(1, 32);
  std::span<const double> x(obs.data.data(), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gmm.log_density(x));
  }
}
BENCHMARK(BM_GmmLogDensity);

}  // namespace

BENCHMARK_MAIN();
