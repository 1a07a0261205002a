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

#ifndef SUPRAHMM_HMM2_HPP_
#define SUPRAHMM_HMM2_HPP_

#include <cstdint>
#include <vector>

#include "suprahmm/features.hpp"
#include "suprahmm/gmm.hpp"
#include "suprahmm/topology.hpp"

namespace suprahmm {

// Transition parameters.  For order-1 models only `matrix` is used
// (a[j*N+k] = P(next=k | current=j)).  For order-2 models `matrix` is the
// first-order bootstrap used for the second frame and `tensor` holds
// a[(i*N+j)*N+k] = P(next=k | previous=i, current=j) for the rest.
struct TransitionModel {
  std::vector<double> matrix;
  std::vector<double> tensor;
};

struct TrainingInfo {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  std::vector<double> history;  // total corpus log-likelihood per iteration
  bool covariance_floored = false;
};

// A first- or second-order hidden Markov model with one Gaussian mixture
// per state.  Immutable once built: scoring functions never mutate it, so
// concurrent read-only use is safe.
struct Hmm2Model {
  Topology topology;
  std::vector<double> initial;          // N
  TransitionModel transitions;
  std::vector<GmmEmission> emissions;  // N
  TrainingInfo training;

  int n_states() const { return topology.n_states; }
  int dim() const { return emissions.empty() ? 0 : emissions.front().dim; }
  void validate() const;
};

// Flat-start model: uniform initial distribution, transitions uniform over
// each state's successor set (zero elsewhere), seeded standard-normal
// mixture means with unit variances and uniform weights.
Hmm2Model init_model(const Topology &topology, int dim, int mixtures,
                     std::uint64_t seed);

// Flat start anchored to the corpus: mixture means are jittered around the
// pooled data mean and variances start at the pooled data variance, which
// keeps early emission densities on-scale.  Transition structure matches
// init_model.
Hmm2Model init_model_from_data(const Topology &topology, int mixtures,
                               std::uint64_t seed,
                               const std::vector<FeatureSequence> &corpus);

// Per-frame log-probability lattice.  Layer 0 scores single states (N
// entries).  For order-2 models layers t >= 1 score (previous, current)
// pairs (N*N entries, previous-major); for order-1 models every layer has
// N entries.
struct ForwardResult {
  std::vector<std::vector<double>> log_alpha;
  double log_likelihood = 0.0;
};

struct BackwardResult {
  std::vector<std::vector<double>> log_beta;  // layers shaped as in forward
};

struct ViterbiResult {
  std::vector<int> path;  // length T, entries in [0, N)
  double log_score = 0.0;
};

ForwardResult forward(const Hmm2Model &model, const FeatureSequence &obs);
BackwardResult backward(const Hmm2Model &model, const FeatureSequence &obs);
ViterbiResult viterbi_align(const Hmm2Model &model, const FeatureSequence &obs);

double log_likelihood(const Hmm2Model &model, const FeatureSequence &obs);

struct TrainConfig {
  int max_iters = 10;
  double tol = 1e-4;        // stop when relative improvement drops below
  int threads = 1;
  double var_floor = kVarianceFloor;
};

// Baum-Welch re-estimation over the corpus.  Transitions with no support
// in the data keep their previous values, so structural zeros survive.
// Results are bit-reproducible for a fixed corpus order regardless of
// thread count.
Hmm2Model train(const Hmm2Model &model,
                const std::vector<FeatureSequence> &corpus,
                const TrainConfig &config);

struct SampledSequence {
  FeatureSequence observations;
  std::vector<int> states;
};

SampledSequence sample_sequence(const Hmm2Model &model, int t,
                                std::uint64_t seed);

}  // namespace suprahmm

#endif  // SUPRAHMM_HMM2_HPP_
