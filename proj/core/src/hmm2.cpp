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

#include "suprahmm/hmm2.hpp"

#include <cmath>
#include <string>

#include "suprahmm/error.hpp"
#include "suprahmm/numeric.hpp"

namespace suprahmm {

namespace {

double safe_log(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

std::vector<double> log_table(const std::vector<double> &probs) {
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = safe_log(probs[i]);
  return out;
}

void check_sequence(const Hmm2Model &model, const FeatureSequence &obs) {
  obs.validate();
  if (obs.dim != model.dim()) {
    throw ConfigError("observation dim " + std::to_string(obs.dim) +
                      " does not match model dim " +
                      std::to_string(model.dim()));
  }
}

// logb[t*N + k] = log b_k(O_t)
std::vector<double> emission_table(const Hmm2Model &model,
                                   const FeatureSequence &obs) {
  const int T = obs.frame_count();
  const int N = model.n_states();
  std::vector<double> logb(static_cast<std::size_t>(T) * N);
  for (int t = 0; t < T; ++t) {
    auto x = obs.frame(t);
    for (int k = 0; k < N; ++k) {
      logb[static_cast<std::size_t>(t) * N + k] =
          model.emissions[k].log_density(x);
    }
  }
  return logb;
}

void fill_uniform_over_successors(const Topology &topology,
                                  std::vector<double> &row, int from) {
  auto succ = topology.successors(from);
  const double p = 1.0 / static_cast<double>(succ.size());
  for (int k : succ) row[k] = p;
}

ForwardResult forward_impl(const Hmm2Model &model, int T,
                           const std::vector<double> &logb);
BackwardResult backward_impl(const Hmm2Model &model, int T,
                             const std::vector<double> &logb);

struct Accumulator {
  std::vector<double> init;    // N
  std::vector<double> matrix;  // N*N
  std::vector<double> tensor;  // N*N*N, order-2 only
  std::vector<double> occ;     // N*M
  std::vector<double> sum;     // N*M*dim
  std::vector<double> sqsum;   // N*M*dim
  double log_likelihood = 0.0;

  Accumulator(int n, int m, int dim, bool order2)
      : init(n, 0.0),
        matrix(static_cast<std::size_t>(n) * n, 0.0),
        tensor(order2 ? static_cast<std::size_t>(n) * n * n : 0, 0.0),
        occ(static_cast<std::size_t>(n) * m, 0.0),
        sum(static_cast<std::size_t>(n) * m * dim, 0.0),
        sqsum(static_cast<std::size_t>(n) * m * dim, 0.0) {}

  void add(const Accumulator &other) {
    for (std::size_t i = 0; i < init.size(); ++i) init[i] += other.init[i];
    for (std::size_t i = 0; i < matrix.size(); ++i)
      matrix[i] += other.matrix[i];
    for (std::size_t i = 0; i < tensor.size(); ++i)
      tensor[i] += other.tensor[i];
    for (std::size_t i = 0; i < occ.size(); ++i) occ[i] += other.occ[i];
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.sum[i];
    for (std::size_t i = 0; i < sqsum.size(); ++i) sqsum[i] += other.sqsum[i];
    log_likelihood += other.log_likelihood;
  }
};

// Adds gamma-weighted per-component moments for one frame of one state.
void accumulate_emission(const Hmm2Model &model, int state, double gamma,
                         std::span<const double> x, double log_state_density,
                         Accumulator &acc) {
  if (gamma <= 0.0) return;
  const GmmEmission &gmm = model.emissions[state];
  const int M = gmm.mixtures();
  const int dim = gmm.dim;
  for (int m = 0; m < M; ++m) {
    if (gmm.weights[m] <= 0.0) continue;
    double resp = gamma * std::exp(std::log(gmm.weights[m]) +
                                   gmm.component_log_density(m, x) -
                                   log_state_density);
    if (resp <= 0.0) continue;
    const std::size_t base = (static_cast<std::size_t>(state) * M + m) * dim;
    acc.occ[static_cast<std::size_t>(state) * M + m] += resp;
    for (int d = 0; d < dim; ++d) {
      acc.sum[base + d] += resp * x[d];
      acc.sqsum[base + d] += resp * x[d] * x[d];
    }
  }
}

// E-step contribution of one sequence.
void accumulate_sequence(const Hmm2Model &model, const FeatureSequence &obs,
                         Accumulator &acc) {
  const int N = model.n_states();
  const int T = obs.frame_count();
  const bool order2 = model.topology.order == 2;
  const std::vector<double> logb = emission_table(model, obs);
  ForwardResult fwd = forward_impl(model, T, logb);
  BackwardResult bwd = backward_impl(model, T, logb);
  const double logp = fwd.log_likelihood;
  if (!std::isfinite(logp)) {
    throw Error("training sequence has zero likelihood (" + obs.source_id +
                ")");
  }
  acc.log_likelihood += logp;

  const std::vector<double> log_matrix = log_table(model.transitions.matrix);
  const std::vector<double> log_tensor = log_table(model.transitions.tensor);

  // Initial occupancy.
  for (int i = 0; i < N; ++i) {
    double g = std::exp(fwd.log_alpha[0][i] + bwd.log_beta[0][i] - logp);
    acc.init[i] += g;
    accumulate_emission(model, i, g, obs.frame(0), logb[i], acc);
  }
  if (T == 1) return;

  if (order2) {
    for (int t = 1; t < T; ++t) {
      for (int j = 0; j < N; ++j) {
        double gamma = 0.0;
        for (int i = 0; i < N; ++i) {
          double pair = std::exp(fwd.log_alpha[t][i * N + j] +
                                 bwd.log_beta[t][i * N + j] - logp);
          gamma += pair;
          if (t == 1) acc.matrix[static_cast<std::size_t>(i) * N + j] += pair;
        }
        accumulate_emission(model, j, gamma, obs.frame(t),
                            logb[static_cast<std::size_t>(t) * N + j], acc);
      }
    }
    for (int t = 2; t < T; ++t) {
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          double head = fwd.log_alpha[t - 1][i * N + j];
          if (head == kLogZero) continue;
          for (int k = 0; k < N; ++k) {
            double la = log_tensor[(static_cast<std::size_t>(i) * N + j) * N +
                                   k];
            if (la == kLogZero) continue;
            double xi = std::exp(head + la +
                                 logb[static_cast<std::size_t>(t) * N + k] +
                                 bwd.log_beta[t][j * N + k] - logp);
            acc.tensor[(static_cast<std::size_t>(i) * N + j) * N + k] += xi;
          }
        }
      }
    }
  } else {
    for (int t = 1; t < T; ++t) {
      for (int j = 0; j < N; ++j) {
        double gamma = std::exp(fwd.log_alpha[t][j] + bwd.log_beta[t][j] -
                                logp);
        accumulate_emission(model, j, gamma, obs.frame(t),
                            logb[static_cast<std::size_t>(t) * N + j], acc);
      }
      for (int i = 0; i < N; ++i) {
        double head = fwd.log_alpha[t - 1][i];
        if (head == kLogZero) continue;
        for (int j = 0; j < N; ++j) {
          double la = log_matrix[static_cast<std::size_t>(i) * N + j];
          if (la == kLogZero) continue;
          double xi = std::exp(head + la +
                               logb[static_cast<std::size_t>(t) * N + j] +
                               bwd.log_beta[t][j] - logp);
          acc.matrix[static_cast<std::size_t>(i) * N + j] += xi;
        }
      }
    }
  }
}

// Normalizes `row` in place; rows with no mass keep `fallback`.
void renormalize(std::span<double> row, std::span<const double> fallback) {
  double total = 0.0;
  for (double v : row) total += v;
  if (total <= 0.0) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = fallback[i];
    return;
  }
  for (double &v : row) v /= total;
}

ForwardResult forward_impl(const Hmm2Model &model, int T,
                           const std::vector<double> &logb) {
  const int N = model.n_states();
  const std::vector<double> log_matrix = log_table(model.transitions.matrix);

  ForwardResult out;
  out.log_alpha.resize(T);
  out.log_alpha[0].resize(N);
  for (int j = 0; j < N; ++j) {
    out.log_alpha[0][j] = safe_log(model.initial[j]) + logb[j];
  }
  if (T == 1) {
    out.log_likelihood = log_sum_exp(out.log_alpha[0]);
    return out;
  }

  if (model.topology.order == 2) {
    const std::vector<double> log_tensor = log_table(model.transitions.tensor);
    out.log_alpha[1].resize(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        out.log_alpha[1][static_cast<std::size_t>(i) * N + j] =
            out.log_alpha[0][i] +
            log_matrix[static_cast<std::size_t>(i) * N + j] +
            logb[static_cast<std::size_t>(1) * N + j];
      }
    }
    std::vector<double> terms(N);
    for (int t = 2; t < T; ++t) {
      out.log_alpha[t].resize(static_cast<std::size_t>(N) * N);
      for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
          for (int i = 0; i < N; ++i) {
            terms[i] = out.log_alpha[t - 1][i * N + j] +
                       log_tensor[(static_cast<std::size_t>(i) * N + j) * N +
                                  k];
          }
          out.log_alpha[t][static_cast<std::size_t>(j) * N + k] =
              log_sum_exp(terms) + logb[static_cast<std::size_t>(t) * N + k];
        }
      }
    }
  } else {
    std::vector<double> terms(N);
    for (int t = 1; t < T; ++t) {
      out.log_alpha[t].resize(N);
      for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
          terms[i] = out.log_alpha[t - 1][i] +
                     log_matrix[static_cast<std::size_t>(i) * N + j];
        }
        out.log_alpha[t][j] =
            log_sum_exp(terms) + logb[static_cast<std::size_t>(t) * N + j];
      }
    }
  }
  out.log_likelihood = log_sum_exp(out.log_alpha[T - 1]);
  return out;
}

BackwardResult backward_impl(const Hmm2Model &model, int T,
                             const std::vector<double> &logb) {
  const int N = model.n_states();
  const std::vector<double> log_matrix = log_table(model.transitions.matrix);

  BackwardResult out;
  out.log_beta.resize(T);
  if (T == 1) {
    out.log_beta[0].assign(N, 0.0);
    return out;
  }

  if (model.topology.order == 2) {
    const std::vector<double> log_tensor = log_table(model.transitions.tensor);
    out.log_beta[T - 1].assign(static_cast<std::size_t>(N) * N, 0.0);
    std::vector<double> terms(N);
    for (int t = T - 2; t >= 1; --t) {
      out.log_beta[t].resize(static_cast<std::size_t>(N) * N);
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          for (int k = 0; k < N; ++k) {
            terms[k] =
                log_tensor[(static_cast<std::size_t>(i) * N + j) * N + k] +
                logb[static_cast<std::size_t>(t + 1) * N + k] +
                out.log_beta[t + 1][j * N + k];
          }
          out.log_beta[t][static_cast<std::size_t>(i) * N + j] =
              log_sum_exp(terms);
        }
      }
    }
    out.log_beta[0].resize(N);
    std::vector<double> first(N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        first[j] = log_matrix[static_cast<std::size_t>(i) * N + j] +
                   logb[static_cast<std::size_t>(1) * N + j] +
                   out.log_beta[1][i * N + j];
      }
      out.log_beta[0][i] = log_sum_exp(first);
    }
  } else {
    out.log_beta[T - 1].assign(N, 0.0);
    std::vector<double> terms(N);
    for (int t = T - 2; t >= 0; --t) {
      out.log_beta[t].resize(N);
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          terms[j] = log_matrix[static_cast<std::size_t>(i) * N + j] +
                     logb[static_cast<std::size_t>(t + 1) * N + j] +
                     out.log_beta[t + 1][j];
        }
        out.log_beta[t][i] = log_sum_exp(terms);
      }
    }
  }
  return out;
}

}  // namespace

void Hmm2Model::validate() const {
  topology.validate();
  const int N = topology.n_states;
  if (static_cast<int>(initial.size()) != N) {
    throw ConfigError("Hmm2Model: initial distribution size mismatch");
  }
  double total = 0.0;
  for (double p : initial) {
    if (p < 0.0) throw ConfigError("Hmm2Model: negative initial probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("Hmm2Model: initial distribution does not sum to 1");
  }
  if (static_cast<int>(transitions.matrix.size()) != N * N) {
    throw ConfigError("Hmm2Model: transition matrix size mismatch");
  }
  for (int i = 0; i < N; ++i) {
    double row = 0.0;
    for (int j = 0; j < N; ++j) {
      double p = transitions.matrix[static_cast<std::size_t>(i) * N + j];
      if (p < 0.0) throw ConfigError("Hmm2Model: negative transition");
      if (p > 0.0 && !topology.allows(i, j)) {
        throw ConfigError("Hmm2Model: transition outside topology");
      }
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9) {
      throw ConfigError("Hmm2Model: transition row does not sum to 1");
    }
  }
  if (topology.order == 2) {
    if (static_cast<int>(transitions.tensor.size()) != N * N * N) {
      throw ConfigError("Hmm2Model: transition tensor size mismatch");
    }
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        double row = 0.0;
        for (int k = 0; k < N; ++k) {
          double p =
              transitions.tensor[(static_cast<std::size_t>(i) * N + j) * N +
                                 k];
          if (p < 0.0) throw ConfigError("Hmm2Model: negative tensor entry");
          if (p > 0.0 && !topology.allows(j, k)) {
            throw ConfigError("Hmm2Model: tensor entry outside topology");
          }
          row += p;
        }
        if (std::abs(row - 1.0) > 1e-9) {
          throw ConfigError("Hmm2Model: tensor slice does not sum to 1");
        }
      }
    }
  } else if (!transitions.tensor.empty()) {
    throw ConfigError("Hmm2Model: order-1 model carries a tensor");
  }
  if (static_cast<int>(emissions.size()) != N) {
    throw ConfigError("Hmm2Model: one emission mixture per state required");
  }
  for (const GmmEmission &gmm : emissions) {
    gmm.validate();
    if (gmm.dim != emissions.front().dim) {
      throw ConfigError("Hmm2Model: inconsistent emission dimensionality");
    }
  }
}

Hmm2Model init_model(const Topology &topology, int dim, int mixtures,
                     std::uint64_t seed) {
  topology.validate();
  if (topology.n_states < 2) throw ConfigError("init_model: need N >= 2");
  if (mixtures < 1) throw ConfigError("init_model: need mixtures >= 1");
  if (dim < 1) throw ConfigError("init_model: need dim >= 1");
  const int N = topology.n_states;

  Hmm2Model model;
  model.topology = topology;
  model.initial.assign(N, 1.0 / N);
  model.transitions.matrix.assign(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i) {
    std::span<double> row{model.transitions.matrix.data() +
                              static_cast<std::size_t>(i) * N,
                          static_cast<std::size_t>(N)};
    std::vector<double> tmp(N, 0.0);
    fill_uniform_over_successors(topology, tmp, i);
    for (int j = 0; j < N; ++j) row[j] = tmp[j];
  }
  if (topology.order == 2) {
    model.transitions.tensor.assign(static_cast<std::size_t>(N) * N * N, 0.0);
    for (int j = 0; j < N; ++j) {
      std::vector<double> slice(N, 0.0);
      fill_uniform_over_successors(topology, slice, j);
      for (int i = 0; i < N; ++i) {
        for (int k = 0; k < N; ++k) {
          model.transitions
              .tensor[(static_cast<std::size_t>(i) * N + j) * N + k] =
              slice[k];
        }
      }
    }
  }

  Rng rng(seed);
  model.emissions.resize(N);
  for (int s = 0; s < N; ++s) {
    GmmEmission &gmm = model.emissions[s];
    gmm.dim = dim;
    gmm.weights.assign(mixtures, 1.0 / mixtures);
    gmm.means.resize(static_cast<std::size_t>(mixtures) * dim);
    gmm.variances.assign(static_cast<std::size_t>(mixtures) * dim, 1.0);
    for (double &m : gmm.means) m = rng.normal();
  }
  model.validate();
  return model;
}

Hmm2Model init_model_from_data(const Topology &topology, int mixtures,
                               std::uint64_t seed,
                               const std::vector<FeatureSequence> &corpus) {
  if (corpus.empty()) throw ConfigError("init_model_from_data: empty corpus");
  const int dim = corpus.front().dim;
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  std::size_t count = 0;
  for (const FeatureSequence &seq : corpus) {
    if (seq.dim != dim) {
      throw ConfigError("init_model_from_data: mixed dimensionality");
    }
    for (int t = 0; t < seq.frame_count(); ++t) {
      auto x = seq.frame(t);
      for (int d = 0; d < dim; ++d) mean[d] += x[d];
      ++count;
    }
  }
  for (double &m : mean) m /= static_cast<double>(count);
  for (const FeatureSequence &seq : corpus) {
    for (int t = 0; t < seq.frame_count(); ++t) {
      auto x = seq.frame(t);
      for (int d = 0; d < dim; ++d) {
        var[d] += (x[d] - mean[d]) * (x[d] - mean[d]);
      }
    }
  }
  for (double &v : var) {
    v = std::max(v / static_cast<double>(count), kVarianceFloor);
  }

  Hmm2Model model = init_model(topology, dim, mixtures, seed);
  Rng rng(derive_seed(seed, "init-from-data"));
  for (GmmEmission &gmm : model.emissions) {
    for (int m = 0; m < gmm.mixtures(); ++m) {
      for (int d = 0; d < dim; ++d) {
        gmm.means[static_cast<std::size_t>(m) * dim + d] =
            mean[d] + rng.normal() * std::sqrt(var[d]);
        gmm.variances[static_cast<std::size_t>(m) * dim + d] = var[d];
      }
    }
  }
  model.validate();
  return model;
}

ForwardResult forward(const Hmm2Model &model, const FeatureSequence &obs) {
  check_sequence(model, obs);
  return forward_impl(model, obs.frame_count(), emission_table(model, obs));
}

BackwardResult backward(const Hmm2Model &model, const FeatureSequence &obs) {
  check_sequence(model, obs);
  return backward_impl(model, obs.frame_count(), emission_table(model, obs));
}

ViterbiResult viterbi_align(const Hmm2Model &model,
                            const FeatureSequence &obs) {
  check_sequence(model, obs);
  const int N = model.n_states();
  const int T = obs.frame_count();
  const std::vector<double> logb = emission_table(model, obs);
  const std::vector<double> log_matrix = log_table(model.transitions.matrix);

  ViterbiResult out;
  out.path.resize(T);

  std::vector<double> layer0(N);
  for (int j = 0; j < N; ++j) {
    layer0[j] = safe_log(model.initial[j]) + logb[j];
  }
  if (T == 1) {
    int best = 0;
    for (int j = 1; j < N; ++j) {
      if (layer0[j] > layer0[best]) best = j;
    }
    out.path[0] = best;
    out.log_score = layer0[best];
    return out;
  }

  if (model.topology.order == 2) {
    const std::vector<double> log_tensor = log_table(model.transitions.tensor);
    std::vector<double> prev(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        prev[static_cast<std::size_t>(i) * N + j] =
            layer0[i] + log_matrix[static_cast<std::size_t>(i) * N + j] +
            logb[static_cast<std::size_t>(1) * N + j];
      }
    }
    // bp[t][j*N+k] = best previous-previous state i for pair (j, k) at t
    std::vector<std::vector<int>> bp(T);
    std::vector<double> cur(static_cast<std::size_t>(N) * N);
    for (int t = 2; t < T; ++t) {
      bp[t].resize(static_cast<std::size_t>(N) * N);
      for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
          double best = kLogZero;
          int arg = 0;
          for (int i = 0; i < N; ++i) {
            double v = prev[i * N + j] +
                       log_tensor[(static_cast<std::size_t>(i) * N + j) * N +
                                  k];
            if (v > best) {
              best = v;
              arg = i;
            }
          }
          cur[static_cast<std::size_t>(j) * N + k] =
              best + logb[static_cast<std::size_t>(t) * N + k];
          bp[t][static_cast<std::size_t>(j) * N + k] = arg;
        }
      }
      prev.swap(cur);
    }
    int best_j = 0, best_k = 0;
    double best = kLogZero;
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) {
        if (prev[static_cast<std::size_t>(j) * N + k] > best) {
          best = prev[static_cast<std::size_t>(j) * N + k];
          best_j = j;
          best_k = k;
        }
      }
    }
    out.log_score = best;
    out.path[T - 1] = best_k;
    out.path[T - 2] = best_j;
    int j = best_j, k = best_k;
    for (int t = T - 1; t >= 2; --t) {
      int i = bp[t][static_cast<std::size_t>(j) * N + k];
      out.path[t - 2] = i;
      k = j;
      j = i;
    }
  } else {
    std::vector<double> prev = layer0;
    std::vector<std::vector<int>> bp(T);
    std::vector<double> cur(N);
    for (int t = 1; t < T; ++t) {
      bp[t].resize(N);
      for (int j = 0; j < N; ++j) {
        double best = kLogZero;
        int arg = 0;
        for (int i = 0; i < N; ++i) {
          double v = prev[i] + log_matrix[static_cast<std::size_t>(i) * N + j];
          if (v > best) {
            best = v;
            arg = i;
          }
        }
        cur[j] = best + logb[static_cast<std::size_t>(t) * N + j];
        bp[t][j] = arg;
      }
      prev = cur;
    }
    int best_j = 0;
    for (int j = 1; j < N; ++j) {
      if (prev[j] > prev[best_j]) best_j = j;
    }
    out.log_score = prev[best_j];
    out.path[T - 1] = best_j;
    for (int t = T - 1; t >= 1; --t) {
      out.path[t - 1] = bp[t][out.path[t]];
    }
  }
  return out;
}

double log_likelihood(const Hmm2Model &model, const FeatureSequence &obs) {
  return forward(model, obs).log_likelihood;
}

Hmm2Model train(const Hmm2Model &model,
                const std::vector<FeatureSequence> &corpus,
                const TrainConfig &config) {
  if (corpus.empty()) throw ConfigError("train: empty corpus");
  if (config.max_iters < 1) throw ConfigError("train: max_iters < 1");
  model.validate();
  for (const FeatureSequence &seq : corpus) check_sequence(model, seq);

  const int N = model.n_states();
  const int M = model.emissions.front().mixtures();
  const int dim = model.dim();
  const bool order2 = model.topology.order == 2;

  Hmm2Model current = model;
  current.training = TrainingInfo{};

  for (int iter = 0; iter < config.max_iters; ++iter) {
    std::vector<Accumulator> slots(corpus.size(),
                                   Accumulator(N, M, dim, order2));
    parallel_for(corpus.size(), config.threads, [&](std::size_t s) {
      accumulate_sequence(current, corpus[s], slots[s]);
    });
    Accumulator total(N, M, dim, order2);
    for (const Accumulator &slot : slots) total.add(slot);

    current.training.history.push_back(total.log_likelihood);
    current.training.final_log_likelihood = total.log_likelihood;
    if (current.training.history.size() >= 2) {
      const auto &h = current.training.history;
      double prev = h[h.size() - 2];
      double gain = (total.log_likelihood - prev) /
                    std::max(std::abs(prev), 1e-12);
      if (gain < config.tol) break;
    }

    renormalize(total.init, current.initial);
    current.initial = total.init;
    for (int i = 0; i < N; ++i) {
      std::span<double> row{total.matrix.data() +
                                static_cast<std::size_t>(i) * N,
                            static_cast<std::size_t>(N)};
      std::span<const double> old{current.transitions.matrix.data() +
                                      static_cast<std::size_t>(i) * N,
                                  static_cast<std::size_t>(N)};
      renormalize(row, old);
    }
    current.transitions.matrix = total.matrix;
    if (order2) {
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          const std::size_t base = (static_cast<std::size_t>(i) * N + j) * N;
          std::span<double> slice{total.tensor.data() + base,
                                  static_cast<std::size_t>(N)};
          std::span<const double> old{current.transitions.tensor.data() + base,
                                      static_cast<std::size_t>(N)};
          renormalize(slice, old);
        }
      }
      current.transitions.tensor = total.tensor;
    }

    for (int s = 0; s < N; ++s) {
      GmmEmission &gmm = current.emissions[s];
      double state_total = 0.0;
      for (int m = 0; m < M; ++m) {
        state_total += total.occ[static_cast<std::size_t>(s) * M + m];
      }
      if (state_total <= 1e-10) continue;
      for (int m = 0; m < M; ++m) {
        double occ = total.occ[static_cast<std::size_t>(s) * M + m];
        gmm.weights[m] = occ / state_total;
        if (occ <= 1e-10) continue;
        const std::size_t acc_base = (static_cast<std::size_t>(s) * M + m) * dim;
        const std::size_t gmm_base = static_cast<std::size_t>(m) * dim;
        for (int d = 0; d < dim; ++d) {
          double mu = total.sum[acc_base + d] / occ;
          double var = total.sqsum[acc_base + d] / occ - mu * mu;
          if (var < config.var_floor) {
            var = config.var_floor;
            current.training.covariance_floored = true;
          }
          gmm.means[gmm_base + d] = mu;
          gmm.variances[gmm_base + d] = var;
        }
      }
    }
    current.training.iterations = iter + 1;
  }
  current.validate();
  return current;
}

SampledSequence sample_sequence(const Hmm2Model &model, int t,
                                std::uint64_t seed) {
  if (t < 1) throw ConfigError("sample_sequence: need t >= 1");
  model.validate();
  const int N = model.n_states();
  Rng rng(seed);

  SampledSequence out;
  out.states.resize(t);
  out.observations.dim = model.dim();
  out.observations.data.resize(static_cast<std::size_t>(t) * model.dim());

  out.states[0] = static_cast<int>(rng.categorical(model.initial));
  if (t >= 2) {
    std::span<const double> row{model.transitions.matrix.data() +
                                    static_cast<std::size_t>(out.states[0]) *
                                        N,
                                static_cast<std::size_t>(N)};
    out.states[1] = static_cast<int>(rng.categorical(row));
  }
  for (int step = 2; step < t; ++step) {
    if (model.topology.order == 2) {
      const std::size_t base =
          (static_cast<std::size_t>(out.states[step - 2]) * N +
           out.states[step - 1]) *
          N;
      std::span<const double> slice{model.transitions.tensor.data() + base,
                                    static_cast<std::size_t>(N)};
      out.states[step] = static_cast<int>(rng.categorical(slice));
    } else {
      std::span<const double> row{
          model.transitions.matrix.data() +
              static_cast<std::size_t>(out.states[step - 1]) * N,
          static_cast<std::size_t>(N)};
      out.states[step] = static_cast<int>(rng.categorical(row));
    }
  }
  for (int step = 0; step < t; ++step) {
    model.emissions[out.states[step]].sample(rng,
                                             out.observations.frame(step));
  }
  return out;
}

}  // namespace suprahmm
