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

#ifndef INERTIA_CONFIG_H_
#define INERTIA_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/arm.h"
#include "inertia/attention_model.h"
#include "inertia/identify.h"
#include "inertia/nn.h"
#include "inertia/sim.h"

namespace inertia {

struct ContinuousConfig {
  TrajectorySpec trajectory;
  std::size_t window = 128;
  std::size_t filter_width = 128;
};

// Everything a run depends on. Defaults: 64-sample windows, 1000 repeats,
// torque schedule 256/300/3e-4, attention schedule 32/30/1e-4 with loss
// weights 1 and 0.3. The seed has no default.
struct ExperimentConfig {
  nlohmann::json effective;  // arm inlined, overrides applied
  std::string hash;          // FNV-1a of effective.dump()

  ArmModel arm;
  ControllerSpec controller;
  std::vector<NamedObject> training_objects;
  std::vector<NamedObject> testing_objects;
  GridSpec grid;
  std::size_t random_per_object = 9000;
  std::size_t test_per_object = 1000;
  std::size_t window = 64;
  std::size_t repeats = 1000;
  WlsOptions wls;
  std::uint64_t seed = 0;
  TrainSchedule torque_schedule{256, 300, 3e-4};
  double holdout_fraction = 0.1;
  AttentionTrainingOptions attention;
  ContinuousConfig continuous;
  std::string output_dir = "out";
};

// Relative paths inside the config (the arm file) resolve against base_dir.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j, const std::string& base_dir);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Re-derives typed fields and the hash after editing `effective`.
ExperimentConfig Rebuild(const ExperimentConfig& config);
ExperimentConfig WithSeed(const ExperimentConfig& config, std::uint64_t seed);

nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace inertia

#endif  // INERTIA_CONFIG_H_
