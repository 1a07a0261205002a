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

#ifndef SUPRAHMM_MODEL_IO_HPP_
#define SUPRAHMM_MODEL_IO_HPP_

#include <filesystem>

#include "suprahmm/classifier.hpp"
#include "suprahmm/vq.hpp"

namespace suprahmm {

// Self-describing text documents (`suprahmm-model v1`).  All probability
// tables are written with 17 significant digits, so a round trip
// reproduces every score bit for bit.
void save_condition_model(const std::filesystem::path &path,
                          const ConditionModel &model);
ConditionModel load_condition_model(const std::filesystem::path &path);

void save_codebook(const std::filesystem::path &path, const Codebook &book);
Codebook load_codebook(const std::filesystem::path &path);

// A bank is a directory: `bank.manifest` (alpha, feature configuration
// and its hash, scoring flags, one `condition <label> <file>` line per
// condition) next to one model document per condition.
void save_bank(const std::filesystem::path &dir, const ConditionBank &bank);
ConditionBank load_bank(const std::filesystem::path &dir);

// Hash of the feature configuration a bank was built with; stored in the
// bank manifest and checked on load.
std::uint64_t feature_config_hash(const MfccConfig &mfcc,
                                  const ProsodyConfig &prosody,
                                  int sample_rate);

}  // namespace suprahmm

#endif  // SUPRAHMM_MODEL_IO_HPP_
