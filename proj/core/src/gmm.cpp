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

#include "suprahmm/gmm.hpp"

#include <cmath>

#include "suprahmm/error.hpp"
#include "suprahmm/numeric.hpp"

namespace suprahmm {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;
}

double GmmEmission::component_log_density(int m,
                                          std::span<const double> x) const {
  auto mu = mean(m);
  auto var = variance(m);
  double acc = 0.0;
  for (int d = 0; d < dim; ++d) {
    double diff = x[d] - mu[d];
    acc += kLogTwoPi + std::log(var[d]) + diff * diff / var[d];
  }
  return -0.5 * acc;
}

double GmmEmission::log_density(std::span<const double> x) const {
  std::vector<double> terms(weights.size());
  for (int m = 0; m < mixtures(); ++m) {
    terms[m] = weights[m] > 0.0
                   ? std::log(weights[m]) + component_log_density(m, x)
                   : kLogZero;
  }
  return log_sum_exp(terms);
}

void GmmEmission::sample(Rng &rng, std::span<double> out) const {
  int m = static_cast<int>(rng.categorical(weights));
  auto mu = mean(m);
  auto var = variance(m);
  for (int d = 0; d < dim; ++d) {
    out[d] = mu[d] + std::sqrt(var[d]) * rng.normal();
  }
}

void GmmEmission::validate(double var_floor) const {
  if (dim < 1) throw ConfigError("GmmEmission: dim < 1");
  if (weights.empty()) throw ConfigError("GmmEmission: no components");
  const std::size_t expect = weights.size() * dim;
  if (means.size() != expect || variances.size() != expect) {
    throw ConfigError("GmmEmission: parameter shape mismatch");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("GmmEmission: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("GmmEmission: weights do not sum to 1");
  }
  for (double v : variances) {
    if (!(v >= var_floor)) {
      throw ConfigError("GmmEmission: variance below floor");
    }
  }
}

}  // namespace suprahmm
