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

#ifndef SUPRAHMM_GMM_HPP_
#define SUPRAHMM_GMM_HPP_

#include <span>
#include <vector>

#include "suprahmm/rng.hpp"

namespace suprahmm {

constexpr double kVarianceFloor = 1e-4;

// Diagonal-covariance Gaussian mixture for one state's observation density.
struct GmmEmission {
  int dim = 0;
  std::vector<double> weights;    // M
  std::vector<double> means;     // M x dim, component-major
  std::vector<double> variances;  // M x dim, component-major

  int mixtures() const { return static_cast<int>(weights.size()); }
  std::span<const double> mean(int m) const {
    return {means.data() + static_cast<std::size_t>(m) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> variance(int m) const {
    return {variances.data() + static_cast<std::size_t>(m) * dim,
            static_cast<std::size_t>(dim)};
  }

  // log N(x; mean_m, diag(variance_m))
  double component_log_density(int m, std::span<const double> x) const;
  // log sum_m weight_m N(x; ...)
  double log_density(std::span<const double> x) const;
  // Draws a component from the weights, then a point from it.
  void sample(Rng &rng, std::span<double> out) const;

  void validate(double var_floor = kVarianceFloor) const;
};

}  // namespace suprahmm

#endif  // SUPRAHMM_GMM_HPP_
