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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "suprahmm/error.hpp"
#include "suprahmm/hmm2.hpp"
#include "suprahmm/numeric.hpp"
#include "suprahmm/rng.hpp"
#include "test_support.hpp"

using namespace suprahmm;
using namespace suprahmm::testing;

namespace {

std::vector<Topology> small_topologies() {
  std::vector<Topology> out;
  for (int n : {2, 3, 4}) {
    for (int order : {1, 2}) {
      for (Shape shape : {Shape::kLinear, Shape::kCircular}) {
        out.push_back(Topology{order, shape, n});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("forward likelihood equals exhaustive path enumeration") {
  int cases = 0;
  for (const Topology &topo : small_topologies()) {
    for (int t = 1; t <= 5; ++t) {
      std::uint64_t seed = derive_seed(100, "fwd-" + std::to_string(cases));
      Hmm2Model model = random_model(topo, 2, 2, seed);
      Rng rng(seed + 1);
      FeatureSequence obs = random_sequence(rng, t, 2);
      double lattice = forward(model, obs).log_likelihood;
      double oracle = enumerate_log_likelihood(model, obs);
      CHECK(std::abs(lattice - oracle) <=
            1e-8 * std::max(1.0, std::abs(oracle)));
      ++cases;
    }
  }
  CHECK(cases == 60);
}

TEST_CASE("forward and log_likelihood agree") {
  Topology topo{2, Shape::kCircular, 3};
  Hmm2Model model = random_model(topo, 2, 2, 9);
  Rng rng(10);
  FeatureSequence obs = random_sequence(rng, 8, 2);
  CHECK(forward(model, obs).log_likelihood ==
        doctest::Approx(log_likelihood(model, obs)));
}

TEST_CASE("an order-2 tensor constant in the oldest state scores like the "
          "collapsed order-1 chain") {
  for (int trial = 0; trial < 10; ++trial) {
    Topology topo2{2, Shape::kCircular, 3};
    std::uint64_t seed = derive_seed(200, "collapse-" + std::to_string(trial));
    Hmm2Model second = random_model(topo2, 2, 2, seed);
    // overwrite the tensor so P(k | i, j) ignores i and equals the matrix
    const int N = 3;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
          second.transitions.tensor[(static_cast<std::size_t>(i) * N + j) * N +
                                    k] =
              second.transitions.matrix[static_cast<std::size_t>(j) * N + k];
        }
      }
    }
    second.validate();

    Hmm2Model first = second;
    first.topology.order = 1;
    first.transitions.tensor.clear();
    first.validate();

    Rng rng(seed + 7);
    for (int s = 0; s < 5; ++s) {
      FeatureSequence obs = random_sequence(rng, 6, 2);
      double l2 = forward(second, obs).log_likelihood;
      double l1 = forward(first, obs).log_likelihood;
      CHECK(std::abs(l2 - l1) <= 1e-10);
    }
  }
}

TEST_CASE("forward-backward products are constant across time") {
  int cases = 0;
  for (const Topology &topo : small_topologies()) {
    std::uint64_t seed = derive_seed(300, "fb-" + std::to_string(cases++));
    Hmm2Model model = random_model(topo, 2, 2, seed);
    Rng rng(seed + 1);
    FeatureSequence obs = random_sequence(rng, 6, 2);
    ForwardResult fwd = forward(model, obs);
    BackwardResult bwd = backward(model, obs);
    for (int t = 0; t < obs.frame_count(); ++t) {
      std::vector<double> combined(fwd.log_alpha[t].size());
      for (std::size_t s = 0; s < combined.size(); ++s) {
        combined[s] = fwd.log_alpha[t][s] + bwd.log_beta[t][s];
      }
      double total = log_sum_exp(combined);
      CHECK(std::abs(total - fwd.log_likelihood) <=
            1e-8 * std::max(1.0, std::abs(fwd.log_likelihood)));
    }
  }
}

TEST_CASE("decoded path equals exhaustive best-path search") {
  int cases = 0;
  for (const Topology &topo : small_topologies()) {
    for (int t : {1, 2, 4, 5}) {
      std::uint64_t seed = derive_seed(400, "vit-" + std::to_string(cases++));
      Hmm2Model model = random_model(topo, 2, 2, seed);
      Rng rng(seed + 1);
      FeatureSequence obs = random_sequence(rng, t, 2);
      ViterbiResult got = viterbi_align(model, obs);
      auto [best, score] = enumerate_best_path(model, obs);
      CHECK(got.path == best);
      CHECK(got.log_score == doctest::Approx(score).epsilon(1e-9));
    }
  }
}

TEST_CASE("single-frame sequences reduce to the initial distribution") {
  Topology topo{2, Shape::kCircular, 4};
  Hmm2Model model = random_model(topo, 2, 1, 17);
  Rng rng(18);
  FeatureSequence obs = random_sequence(rng, 1, 2);
  double direct = kLogZero;
  for (int s = 0; s < 4; ++s) {
    direct = log_add(direct, std::log(model.initial[s]) +
                                 model.emissions[s].log_density(obs.frame(0)));
  }
  CHECK(forward(model, obs).log_likelihood == doctest::Approx(direct));
  ViterbiResult vit = viterbi_align(model, obs);
  CHECK(vit.path.size() == 1);
}

TEST_CASE("long sequences keep finite log-likelihoods") {
  Topology topo{2, Shape::kCircular, 4};
  Hmm2Model model = random_model(topo, 3, 2, 23);
  Rng rng(24);
  FeatureSequence obs = random_sequence(rng, 10000, 3);
  double ll = forward(model, obs).log_likelihood;
  CHECK(std::isfinite(ll));
  CHECK(ll < 0.0);
  ViterbiResult vit = viterbi_align(model, obs);
  CHECK(std::isfinite(vit.log_score));
  CHECK(vit.log_score <= ll + 1e-9);
}

TEST_CASE("flat-start models are uniform over the allowed structure") {
  Topology topo{2, Shape::kCircular, 6};
  Hmm2Model model = init_model(topo, 4, 3, 5);
  for (double v : model.initial) CHECK(v == doctest::Approx(1.0 / 6));
  const int N = 6;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double expected = topo.allows(i, j) ? 1.0 / 3 : 0.0;
      CHECK(model.transitions.matrix[static_cast<std::size_t>(i) * N + j] ==
            doctest::Approx(expected));
      for (int k = 0; k < N; ++k) {
        double t_expected = topo.allows(j, k) ? 1.0 / 3 : 0.0;
        CHECK(model.transitions
                  .tensor[(static_cast<std::size_t>(i) * N + j) * N + k] ==
              doctest::Approx(t_expected));
      }
    }
  }
  CHECK_THROWS_AS(init_model(Topology{2, Shape::kCircular, 1}, 4, 1, 5),
                  ConfigError);
}

TEST_CASE("data-anchored initialization matches the pooled statistics") {
  Topology topo{1, Shape::kLinear, 3};
  Rng rng(31);
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(random_sequence(rng, 20, 2));
  Hmm2Model model = init_model_from_data(topo, 2, 99, corpus);
  double mean0 = 0.0, count = 0.0;
  for (const auto &seq : corpus) {
    for (int t = 0; t < seq.frame_count(); ++t) {
      mean0 += seq.frame(t)[0];
      count += 1.0;
    }
  }
  mean0 /= count;
  // every mixture mean is a jittered copy of the pooled mean
  for (const GmmEmission &gmm : model.emissions) {
    for (int m = 0; m < gmm.mixtures(); ++m) {
      CHECK(std::abs(gmm.mean(m)[0] - mean0) < 10.0);
    }
    for (double v : gmm.variances) CHECK(v >= kVarianceFloor);
  }
  Hmm2Model again = init_model_from_data(topo, 2, 99, corpus);
  CHECK(again.emissions[0].means == model.emissions[0].means);
}

TEST_CASE("training increases the likelihood monotonically") {
  Topology topo{2, Shape::kCircular, 3};
  Hmm2Model truth = random_model(topo, 2, 1, 55);
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.push_back(
        sample_sequence(truth, 20, derive_seed(56, std::to_string(i)))
            .observations);
  }
  Hmm2Model start = init_model_from_data(topo, 1, 57, corpus);
  TrainConfig config;
  config.max_iters = 8;
  config.tol = 0.0;
  Hmm2Model trained = train(start, corpus, config);
  REQUIRE(trained.training.history.size() >= 2);
  for (std::size_t i = 1; i < trained.training.history.size(); ++i) {
    CHECK(trained.training.history[i] >=
          trained.training.history[i - 1] - 1e-6);
  }
  CHECK(trained.training.final_log_likelihood >=
        trained.training.history.front());
}

TEST_CASE("training is reproducible across thread counts") {
  Topology topo{2, Shape::kCircular, 3};
  Hmm2Model truth = random_model(topo, 2, 1, 65);
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 12; ++i) {
    corpus.push_back(
        sample_sequence(truth, 15, derive_seed(66, std::to_string(i)))
            .observations);
  }
  Hmm2Model start = init_model_from_data(topo, 1, 67, corpus);
  TrainConfig serial;
  serial.max_iters = 4;
  serial.threads = 1;
  TrainConfig parallel = serial;
  parallel.threads = 4;
  Hmm2Model a = train(start, corpus, serial);
  Hmm2Model b = train(start, corpus, parallel);
  CHECK(a.transitions.matrix == b.transitions.matrix);
  CHECK(a.transitions.tensor == b.transitions.tensor);
  for (int s = 0; s < 3; ++s) {
    CHECK(a.emissions[s].means == b.emissions[s].means);
    CHECK(a.emissions[s].variances == b.emissions[s].variances);
  }
}

TEST_CASE("training recovers the generating transition structure") {
  Topology topo{2, Shape::kCircular, 3};
  Hmm2Model truth = random_model(topo, 1, 1, 71);
  // separate the states so the alignment is identifiable
  for (int s = 0; s < 3; ++s) {
    truth.emissions[s].means[0] = 10.0 * s;
    truth.emissions[s].variances[0] = 0.5;
  }
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 120; ++i) {
    corpus.push_back(
        sample_sequence(truth, 40, derive_seed(72, std::to_string(i)))
            .observations);
  }
  Hmm2Model start = init_model(topo, 1, 1, 73);
  // anchor the means near the well-separated clusters
  for (int s = 0; s < 3; ++s) {
    start.emissions[s].means[0] = 10.0 * s + 1.0;
    start.emissions[s].variances[0] = 2.0;
  }
  TrainConfig config;
  config.max_iters = 30;
  config.tol = 1e-9;
  Hmm2Model trained = train(start, corpus, config);

  double max_err = 0.0;
  for (std::size_t i = 0; i < truth.transitions.tensor.size(); ++i) {
    max_err = std::max(max_err, std::abs(truth.transitions.tensor[i] -
                                         trained.transitions.tensor[i]));
  }
  CHECK(max_err < 0.1);
  for (int s = 0; s < 3; ++s) {
    CHECK(std::abs(trained.emissions[s].means[0] - 10.0 * s) < 0.5);
  }
}

TEST_CASE("a single-state model trains exactly like a plain mixture fit") {
  Topology topo{1, Shape::kLinear, 1};
  Rng rng(81);
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(random_sequence(rng, 30, 1));

  Hmm2Model model;
  model.topology = topo;
  model.initial = {1.0};
  model.transitions.matrix = {1.0};
  GmmEmission gmm;
  gmm.dim = 1;
  gmm.weights = {1.0};
  gmm.means = {0.5};
  gmm.variances = {4.0};
  model.emissions = {gmm};
  model.validate();

  TrainConfig config;
  config.max_iters = 1;
  config.tol = 0.0;
  Hmm2Model trained = train(model, corpus, config);

  // with one state and one component the M-step is the sample moments
  double sum = 0.0, sq = 0.0, n = 0.0;
  for (const auto &seq : corpus) {
    for (double v : seq.data) {
      sum += v;
      sq += v * v;
      n += 1.0;
    }
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(trained.emissions[0].means[0] == doctest::Approx(mean).epsilon(1e-9));
  CHECK(trained.emissions[0].variances[0] ==
        doctest::Approx(var).epsilon(1e-9));
}

TEST_CASE("the stopping rule caps the applied updates") {
  Topology topo{1, Shape::kLinear, 2};
  Hmm2Model truth = random_model(topo, 1, 1, 91);
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 10; ++i) {
    corpus.push_back(
        sample_sequence(truth, 25, derive_seed(92, std::to_string(i)))
            .observations);
  }
  Hmm2Model start = init_model_from_data(topo, 1, 93, corpus);
  TrainConfig config;
  config.max_iters = 50;
  config.tol = 1e-2;  // loose: should stop early
  Hmm2Model trained = train(start, corpus, config);
  CHECK(trained.training.iterations < 50);
  CHECK(trained.training.history.size() ==
        static_cast<std::size_t>(trained.training.iterations) + 1);
}

TEST_CASE("sampling is deterministic and respects the topology") {
  Topology topo{2, Shape::kCircular, 5};
  Hmm2Model model = random_model(topo, 2, 2, 95);
  SampledSequence a = sample_sequence(model, 50, 1234);
  SampledSequence b = sample_sequence(model, 50, 1234);
  CHECK(a.states == b.states);
  CHECK(a.observations.data == b.observations.data);
  for (std::size_t t = 1; t < a.states.size(); ++t) {
    CHECK(topo.allows(a.states[t - 1], a.states[t]));
  }
  SampledSequence c = sample_sequence(model, 50, 1235);
  CHECK(a.states != c.states);
}

TEST_CASE("scoring rejects dimension mismatches") {
  Topology topo{1, Shape::kLinear, 2};
  Hmm2Model model = random_model(topo, 3, 1, 97);
  Rng rng(98);
  FeatureSequence obs = random_sequence(rng, 5, 2);
  CHECK_THROWS_AS(forward(model, obs), ConfigError);
  CHECK_THROWS_AS(viterbi_align(model, obs), ConfigError);
}
