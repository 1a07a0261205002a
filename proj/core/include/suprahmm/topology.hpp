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

#ifndef SUPRAHMM_TOPOLOGY_HPP_
#define SUPRAHMM_TOPOLOGY_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "suprahmm/error.hpp"

namespace suprahmm {

enum class Shape { kLinear, kCircular };

inline std::string shape_name(Shape shape) {
  return shape == Shape::kLinear ? "linear" : "circular";
}

inline Shape shape_from_name(const std::string &name) {
  if (name == "linear") return Shape::kLinear;
  if (name == "circular") return Shape::kCircular;
  throw ConfigError("unknown topology shape: " + name);
}

// Chain structure of a model: Markov order, ring or left-to-right wiring,
// and state count.  N=1 is admitted here so degenerate models can be built
// in tests; the standard initializer requires N >= 2.
struct Topology {
  int order = 2;
  Shape shape = Shape::kCircular;
  int n_states = 6;

  void validate() const {
    if (order != 1 && order != 2) {
      throw ConfigError("Topology: order must be 1 or 2");
    }
    if (n_states < 1) throw ConfigError("Topology: n_states < 1");
  }

  // States reachable from i in one step, ascending, duplicates removed.
  std::vector<int> successors(int i) const {
    std::vector<int> out;
    if (shape == Shape::kCircular) {
      const int n = n_states;
      int prev = (i - 1 + n) % n;
      int next = (i + 1) % n;
      out.push_back(prev);
      out.push_back(i);
      out.push_back(next);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    } else {
      out.push_back(i);
      if (i + 1 < n_states) out.push_back(i + 1);
    }
    return out;
  }

  bool allows(int from, int to) const {
    if (shape == Shape::kLinear) {
      return to == from || to == from + 1;
    }
    const int n = n_states;
    int d = (to - from + n) % n;
    return d == 0 || d == 1 || d == n - 1;
  }

  bool operator==(const Topology &) const = default;
};

}  // namespace suprahmm

#endif  // SUPRAHMM_TOPOLOGY_HPP_
