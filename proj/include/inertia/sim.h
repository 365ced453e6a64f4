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

#ifndef INERTIA_SIM_H_
#define INERTIA_SIM_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "inertia/arm.h"
#include "inertia/rng.h"
#include "inertia/statics.h"

namespace inertia {

// Per-joint PD position loop (proportional part dominates at rest), friction
// and measurement-noise model of the simulated robot.
struct ControllerSpec {
  Eigen::VectorXd kp;                      // N m / rad
  Eigen::VectorXd friction_coulomb;        // N m
  Eigen::VectorXd friction_position_gain;  // N m, scales |sin q|
  Eigen::VectorXd encoder_noise_sd;        // rad, per joint
  double sensor_noise_sd = 0.0;            // N m
  Eigen::VectorXd sensor_bias;             // N m
};

void ValidateController(const ControllerSpec& controller, int n_joints);

// Friction magnitude per joint at q: coulomb + gain * |sin q|.
Eigen::VectorXd FrictionMagnitude(const ControllerSpec& controller, const Eigen::VectorXd& q);

struct NamedObject {
  std::string name;
  ObjectSpec spec;
  double com_scale = 1.0;  // enclosing-cuboid diagonal (m)
};

struct SteadySample {
  Eigen::VectorXd q_d;
  Eigen::VectorXd q;        // measured, includes encoder noise
  Eigen::VectorXd rot_dir;  // entries exactly +1 or -1
  Pose tag_pose;
  Eigen::VectorXd tau_true;        // external torque at the converged q
  Eigen::VectorXd tau_g;           // free-motion torque at the converged q
  Eigen::VectorXd tau_sensor_raw;  // simulated current-sensor reading
  std::string object_id;
  ObjectSpec object;

  Eigen::VectorXd discrepancy() const { return q_d - q; }
};

struct SteadyStateOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

// Solves kp (q_d - q) = tau_ext(q) + rot_dir * friction(q) by fixed-point
// iteration. Throws NumericalError when the iteration does not converge.
SteadySample SteadyState(const ArmModel& arm, const ControllerSpec& controller,
                         const Eigen::VectorXd& q_d, const Eigen::VectorXd& rot_dir,
                         const NamedObject& object, Rng& rng,
                         const SteadyStateOptions& options = {});

struct Dataset {
  std::vector<SteadySample> samples;
  std::size_t rejected = 0;  // non-converged or infeasible draws
};

struct GenerationOptions {
  std::uint64_t seed = 0;
  int workers = 1;
};

struct GridSpec {
  double step = 0.0;                       // rad
  std::vector<Eigen::Vector2d> ranges;     // per joint [lo, hi] rad; empty = joint limits
};

// Joint positions of the planning grid that pass the feasibility predicate.
std::vector<Eigen::VectorXd> PlanningGridPositions(const ArmModel& arm, const GridSpec& grid);

// Grid positions x all 2^N rotation-direction vectors x objects.
Dataset GeneratePlanningGrid(const ArmModel& arm, const ControllerSpec& controller,
                             const std::vector<NamedObject>& objects, const GridSpec& grid,
                             const GenerationOptions& options);

// q_d uniform within limits (rejecting infeasible draws), rot_dir uniform.
Dataset GenerateRandomSamples(const ArmModel& arm, const ControllerSpec& controller,
                              const std::vector<NamedObject>& objects,
                              std::size_t count_per_object, const GenerationOptions& options);

// Smooth multi-sine joint trajectory, rot_dir from the sign of velocity, the
// carried object switching per segment.
struct TrajectorySegment {
  NamedObject object;
  std::size_t samples = 0;
};
struct TrajectorySpec {
  std::vector<TrajectorySegment> segments;
  double period_samples = 400.0;       // base period of the multi-sine path
  std::vector<Eigen::Vector2d> ranges;  // per joint [lo, hi] rad; empty = 80% of limits
};
Dataset GenerateTrajectory(const ArmModel& arm, const ControllerSpec& controller,
                           const TrajectorySpec& spec, const GenerationOptions& options);

enum class WindowMode { kRandom, kTrajectory };

// Index windows into `pool` (indices of dataset samples). Random mode draws
// `draws` windows without replacement inside each window; trajectory mode
// returns every consecutive block (stride 1) and ignores `draws`.
std::vector<std::vector<std::size_t>> MakeInferenceWindows(
    const std::vector<std::size_t>& pool, std::size_t window, std::size_t draws, WindowMode mode,
    Rng& rng);

}  // namespace inertia

#endif  // INERTIA_SIM_H_
