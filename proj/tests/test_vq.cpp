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
#include <limits>
#include <vector>

#include "doctest.h"
#include "suprahmm/error.hpp"
#include "suprahmm/rng.hpp"
#include "suprahmm/vq.hpp"
#include "test_support.hpp"

using namespace suprahmm;
using namespace suprahmm::testing;

namespace {

// Naive k-means with the same seeding and tie rules, used as an oracle.
double reference_kmeans_distortion(const FeatureSequence &frames, int k,
                                   std::uint64_t seed, int max_iters) {
  const int T = frames.frame_count();
  const int dim = frames.dim;
  Rng rng(seed);
  std::vector<int> chosen;
  while (static_cast<int>(chosen.size()) < k) {
    int candidate = rng.index(T);
    bool seen = false;
    for (int c : chosen) seen = seen || c == candidate;
    if (!seen) chosen.push_back(candidate);
  }
  std::vector<std::vector<double>> centroids(k, std::vector<double>(dim));
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < dim; ++d) centroids[c][d] = frames.frame(chosen[c])[d];
  }

  std::vector<int> assign(T, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int t = 0; t < T; ++t) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        double d2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          double diff = frames.frame(t)[d] - centroids[c][d];
          d2 += diff * diff;
        }
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      if (assign[t] != best_c) {
        assign[t] = best_c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(dim, 0.0);
      int count = 0;
      for (int t = 0; t < T; ++t) {
        if (assign[t] != c) continue;
        ++count;
        for (int d = 0; d < dim; ++d) mean[d] += frames.frame(t)[d];
      }
      if (count == 0) continue;  // the production code re-seeds; avoided here
      for (int d = 0; d < dim; ++d) centroids[c][d] = mean[d] / count;
    }
  }

  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        double diff = frames.frame(t)[d] - centroids[c][d];
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    total += best;
  }
  return total / T;
}

FeatureSequence clustered_frames(std::uint64_t seed, int per_cluster,
                                 const std::vector<double> &centers) {
  Rng rng(seed);
  FeatureSequence frames;
  frames.dim = 2;
  for (double center : centers) {
    for (int i = 0; i < per_cluster; ++i) {
      frames.data.push_back(center + 0.1 * rng.normal());
      frames.data.push_back(-center + 0.1 * rng.normal());
    }
  }
  frames.source_id = "clusters";
  return frames;
}

}  // namespace

TEST_CASE("codebook training matches a reference clustering end state") {
  FeatureSequence frames = clustered_frames(5, 40, {0.0, 10.0, 20.0});
  Codebook book = train_codebook(frames, 3, 99);
  double reference = reference_kmeans_distortion(frames, 3, 99, 100);
  REQUIRE_FALSE(book.distortion_history.empty());
  CHECK(std::abs(book.distortion_history.back() - reference) < 1e-9);
}

TEST_CASE("training distortion never increases") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    Rng rng(seed);
    FeatureSequence frames = random_sequence(rng, 300, 4);
    Codebook book = train_codebook(frames, 8, seed);
    for (std::size_t i = 1; i < book.distortion_history.size(); ++i) {
      CHECK(book.distortion_history[i] <=
            book.distortion_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("centroids land on well-separated clusters") {
  FeatureSequence frames = clustered_frames(6, 50, {0.0, 100.0});
  Codebook book = train_codebook(frames, 2, 7);
  double lo = std::min(book.centroid(0)[0], book.centroid(1)[0]);
  double hi = std::max(book.centroid(0)[0], book.centroid(1)[0]);
  CHECK(std::abs(lo - 0.0) < 1.0);
  CHECK(std::abs(hi - 100.0) < 1.0);
  CHECK(vq_distortion(book, frames) < 1.0);
}

TEST_CASE("quantization distortion is the mean nearest-centroid distance") {
  Codebook book;
  book.dim = 1;
  book.centroids = {0.0, 10.0};
  book.label = "direct";
  FeatureSequence obs;
  obs.dim = 1;
  obs.data = {1.0, 9.0, 4.0};
  // distances: 1, 1, 4
  CHECK(vq_distortion(book, obs) == doctest::Approx(2.0));
}

TEST_CASE("classification chooses the nearest codebook with ties to the "
          "lowest index") {
  Codebook near;
  near.dim = 1;
  near.centroids = {0.0};
  near.label = "near";
  Codebook far = near;
  far.centroids = {100.0};
  far.label = "far";
  Codebook same = near;
  same.label = "same";

  FeatureSequence obs;
  obs.dim = 1;
  obs.data = {0.5, -0.5};
  CHECK(vq_classify({near, far}, obs) == 0);
  CHECK(vq_classify({far, near}, obs) == 1);
  CHECK(vq_classify({near, same, far}, obs) == 0);  // tie 0 vs 1
}

TEST_CASE("asking for more centroids than frames is an error") {
  FeatureSequence frames;
  frames.dim = 1;
  frames.data = {1.0, 2.0};
  CHECK_THROWS_AS(train_codebook(frames, 3, 1), ConfigError);
  CHECK_THROWS_AS(train_codebook(frames, 0, 1), ConfigError);
}

TEST_CASE("training survives clusters that empty out") {
  // two identical far points and many near points: with k=3 some cluster
  // will lose its members and be re-seeded from the farthest frame
  FeatureSequence frames;
  frames.dim = 1;
  for (int i = 0; i < 50; ++i) frames.data.push_back(0.001 * i);
  frames.data.push_back(1000.0);
  Codebook book = train_codebook(frames, 3, 21);
  CHECK(book.k() == 3);
  CHECK_NOTHROW(book.validate());
  // the outlier must own a centroid
  double best = 1e18;
  for (int c = 0; c < 3; ++c) {
    best = std::min(best, std::abs(book.centroid(c)[0] - 1000.0));
  }
  CHECK(best < 1.0);
}
