// Copyright 2026 The Inertia Authors
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

#ifndef INERTIA_ERRORS_H_
#define INERTIA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace inertia {

// invalid configuration, schema violation or missing prerequisite
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// malformed or inconsistent data (datasets, checkpoints, windows)
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// solver failure: non-convergence, singular systems
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace inertia

#endif  // INERTIA_ERRORS_H_
