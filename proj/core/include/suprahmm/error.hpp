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

#ifndef SUPRAHMM_ERROR_HPP
#define SUPRAHMM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace suprahmm {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Invalid configuration or precondition violation (bad shapes, weights
// outside [0,1], empty inputs, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what) : Error(what) {}
};

// Filesystem / OS level failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error(what) {}
};

// A file was readable but its content does not match the expected format.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string &what) : Error(what) {}
};

}  // namespace suprahmm

#endif  // SUPRAHMM_ERROR_HPP
