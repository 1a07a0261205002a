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

#include "suprahmm/vq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "suprahmm/error.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

void Codebook::validate() const {
  if (dim < 1) throw ConfigError("Codebook: dim < 1");
  if (centroids.empty() || centroids.size() % dim != 0) {
    throw ConfigError("Codebook: centroid block is not k whole vectors");
  }
  for (double v : centroids) {
    if (!std::isfinite(v)) throw ConfigError("Codebook: non-finite centroid");
  }
}

Codebook train_codebook(const FeatureSequence &frames, int k,
                        std::uint64_t seed, int max_iters) {
  frames.validate();
  if (k < 1) throw ConfigError("train_codebook: k < 1");
  if (max_iters < 1) throw ConfigError("train_codebook: max_iters < 1");
  const int n = frames.frame_count();
  const int dim = frames.dim;
  if (n < k) {
    throw ConfigError("train_codebook: " + std::to_string(n) +
                      " frames for k=" + std::to_string(k));
  }

  Codebook book;
  book.dim = dim;
  book.centroids.resize(static_cast<std::size_t>(k) * dim);

  // Draw k distinct frame indices.
  Rng rng(seed);
  std::vector<int> chosen;
  std::vector<char> used(n, 0);
  while (static_cast<int>(chosen.size()) < k) {
    int idx = static_cast<int>(rng.index(n));
    if (used[idx]) continue;
    used[idx] = 1;
    chosen.push_back(idx);
  }
  for (int c = 0; c < k; ++c) {
    auto src = frames.frame(chosen[c]);
    for (int d = 0; d < dim; ++d) {
      book.centroids[static_cast<std::size_t>(c) * dim + d] = src[d];
    }
  }

  std::vector<int> assignment(n, -1);
  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<int> counts(k);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double total_sq = 0.0;
    double worst_sq = -1.0;
    int worst_frame = 0;
    for (int t = 0; t < n; ++t) {
      auto x = frames.frame(t);
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        double d2 = squared_distance(x, book.centroid(c));
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      if (assignment[t] != arg) {
        assignment[t] = arg;
        changed = true;
      }
      total_sq += best;
      if (best > worst_sq) {
        worst_sq = best;
        worst_frame = t;
      }
    }
    book.distortion_history.push_back(total_sq / n);
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int t = 0; t < n; ++t) {
      auto x = frames.frame(t);
      const std::size_t base =
          static_cast<std::size_t>(assignment[t]) * dim;
      for (int d = 0; d < dim; ++d) sums[base + d] += x[d];
      ++counts[assignment[t]];
    }
    for (int c = 0; c < k; ++c) {
      const std::size_t base = static_cast<std::size_t>(c) * dim;
      if (counts[c] == 0) {
        auto src = frames.frame(worst_frame);
        for (int d = 0; d < dim; ++d) book.centroids[base + d] = src[d];
        continue;
      }
      for (int d = 0; d < dim; ++d) {
        book.centroids[base + d] = sums[base + d] / counts[c];
      }
    }
  }
  book.validate();
  return book;
}

double vq_distortion(const Codebook &codebook, const FeatureSequence &obs) {
  codebook.validate();
  obs.validate();
  if (obs.dim != codebook.dim) {
    throw ConfigError("vq_distortion: dimension mismatch");
  }
  double total = 0.0;
  for (int t = 0; t < obs.frame_count(); ++t) {
    auto x = obs.frame(t);
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < codebook.k(); ++c) {
      double d2 = squared_distance(x, codebook.centroid(c));
      if (d2 < best) best = d2;
    }
    total += std::sqrt(best);
  }
  return total / obs.frame_count();
}

int vq_classify(const std::vector<Codebook> &codebooks,
                const FeatureSequence &obs) {
  if (codebooks.empty()) throw ConfigError("vq_classify: empty codebook list");
  int best = 0;
  double best_distortion = vq_distortion(codebooks[0], obs);
  for (std::size_t c = 1; c < codebooks.size(); ++c) {
    double d = vq_distortion(codebooks[c], obs);
    if (d < best_distortion) {
      best_distortion = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace suprahmm
