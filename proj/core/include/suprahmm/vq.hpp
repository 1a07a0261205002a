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

#ifndef SUPRAHMM_VQ_HPP_
#define SUPRAHMM_VQ_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "suprahmm/features.hpp"

namespace suprahmm {

// Per-condition codebook of centroid frames.
struct Codebook {
  std::string label;
  int dim = 0;
  std::vector<double> centroids;  // k x dim, centroid-major
  // Mean squared quantization error per training iteration (the k-means
  // objective, so it never increases).
  std::vector<double> distortion_history;

  int k() const { return dim > 0 ? static_cast<int>(centroids.size()) / dim : 0; }
  std::span<const double> centroid(int c) const {
    return {centroids.data() + static_cast<std::size_t>(c) * dim,
            static_cast<std::size_t>(dim)};
  }
  void validate() const;
};

// K-means over the pooled frames: centroids seeded from k distinct random
// frames, then assign/recompute until assignments stop changing or
// max_iters; an emptied cluster is re-seeded from the frame farthest from
// its assigned centroid.
Codebook train_codebook(const FeatureSequence &frames, int k,
                        std::uint64_t seed, int max_iters = 100);

// Average over frames of the Euclidean distance to the nearest centroid.
double vq_distortion(const Codebook &codebook, const FeatureSequence &obs);

// Index of the codebook with the lowest average distortion; ties go to
// the lowest index.
int vq_classify(const std::vector<Codebook> &codebooks,
                const FeatureSequence &obs);

}  // namespace suprahmm

#endif  // SUPRAHMM_VQ_HPP_
