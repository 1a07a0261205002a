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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "suprahmm/error.hpp"
#include "suprahmm/gmm.hpp"
#include "suprahmm/rng.hpp"
#include "suprahmm/topology.hpp"

using namespace suprahmm;

TEST_CASE("ring topology wraps its neighborhood") {
  Topology topo{2, Shape::kCircular, 6};
  CHECK(topo.successors(0) == std::vector<int>{0, 1, 5});
  CHECK(topo.successors(3) == std::vector<int>{2, 3, 4});
  CHECK(topo.successors(5) == std::vector<int>{0, 4, 5});
  CHECK(topo.allows(5, 0));
  CHECK(topo.allows(0, 5));
  CHECK_FALSE(topo.allows(0, 2));
  CHECK_FALSE(topo.allows(2, 0));
}

TEST_CASE("chain topology moves forward with a final self-loop") {
  Topology topo{1, Shape::kLinear, 4};
  CHECK(topo.successors(0) == std::vector<int>{0, 1});
  CHECK(topo.successors(3) == std::vector<int>{3});
  CHECK(topo.allows(2, 3));
  CHECK_FALSE(topo.allows(3, 2));
  CHECK_FALSE(topo.allows(0, 2));
}

TEST_CASE("tiny rings collapse duplicate neighbors") {
  Topology two{2, Shape::kCircular, 2};
  CHECK(two.successors(0) == std::vector<int>{0, 1});
  CHECK(two.successors(1) == std::vector<int>{0, 1});
  Topology one{1, Shape::kCircular, 1};
  CHECK(one.successors(0) == std::vector<int>{0});
}

TEST_CASE("topology validation rejects bad orders and counts") {
  Topology topo;
  topo.order = 3;
  CHECK_THROWS_AS(topo.validate(), ConfigError);
  topo.order = 2;
  topo.n_states = 0;
  CHECK_THROWS_AS(topo.validate(), ConfigError);
}

TEST_CASE("shape names round trip") {
  CHECK(shape_from_name(shape_name(Shape::kLinear)) == Shape::kLinear);
  CHECK(shape_from_name(shape_name(Shape::kCircular)) == Shape::kCircular);
  CHECK_THROWS_AS(shape_from_name("hexagonal"), ConfigError);
}

TEST_CASE("single-component density matches the diagonal gaussian formula") {
  GmmEmission gmm;
  gmm.dim = 2;
  gmm.weights = {1.0};
  gmm.means = {1.0, -2.0};
  gmm.variances = {0.5, 2.0};
  std::vector<double> x{0.0, 0.0};
  double expected = -0.5 * (2.0 * std::log(2.0 * 3.14159265358979323846) +
                            std::log(0.5) + std::log(2.0) +
                            (0.0 - 1.0) * (0.0 - 1.0) / 0.5 +
                            (0.0 + 2.0) * (0.0 + 2.0) / 2.0);
  CHECK(gmm.log_density(x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mixture density is the weighted sum of component densities") {
  GmmEmission gmm;
  gmm.dim = 1;
  gmm.weights = {0.25, 0.75};
  gmm.means = {0.0, 3.0};
  gmm.variances = {1.0, 4.0};
  std::vector<double> x{1.0};
  double c0 = std::exp(gmm.component_log_density(0, x));
  double c1 = std::exp(gmm.component_log_density(1, x));
  CHECK(std::exp(gmm.log_density(x)) ==
        doctest::Approx(0.25 * c0 + 0.75 * c1).epsilon(1e-12));
}

TEST_CASE("gmm sampling reproduces the component moments") {
  GmmEmission gmm;
  gmm.dim = 1;
  gmm.weights = {1.0};
  gmm.means = {2.0};
  gmm.variances = {9.0};
  Rng rng(77);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  std::vector<double> x(1);
  for (int i = 0; i < n; ++i) {
    gmm.sample(rng, x);
    sum += x[0];
    sq += x[0] * x[0];
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
  CHECK(var == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("gmm validation enforces weight normalization and the variance "
          "floor") {
  GmmEmission gmm;
  gmm.dim = 1;
  gmm.weights = {0.5, 0.4};
  gmm.means = {0.0, 1.0};
  gmm.variances = {1.0, 1.0};
  CHECK_THROWS_AS(gmm.validate(), ConfigError);
  gmm.weights = {0.5, 0.5};
  gmm.variances = {1.0, 1e-9};
  CHECK_THROWS_AS(gmm.validate(), ConfigError);
  gmm.variances = {1.0, kVarianceFloor};
  CHECK_NOTHROW(gmm.validate());
}
