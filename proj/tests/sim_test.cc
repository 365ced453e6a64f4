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

#include "inertia/sim.h"

#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "inertia/config.h"
#include "inertia/dataset_io.h"
#include "inertia/errors.h"
#include "test_util.h"

namespace inertia {
namespace {

ControllerSpec Controller(int n, double kp, double coulomb = 0.0, double gain = 0.0,
                          double encoder = 0.0, double sensor = 0.0) {
  ControllerSpec c;
  c.kp = Eigen::VectorXd::Constant(n, kp);
  c.friction_coulomb = Eigen::VectorXd::Constant(n, coulomb);
  c.friction_position_gain = Eigen::VectorXd::Constant(n, gain);
  c.encoder_noise_sd = Eigen::VectorXd::Constant(n, encoder);
  c.sensor_noise_sd = sensor;
  c.sensor_bias = Eigen::VectorXd::Zero(n);
  return c;
}

NamedObject Obj(const std::string& name, double mass,
                const Eigen::Vector3d& com = Eigen::Vector3d(0.01, 0.0, -0.02)) {
  return {name, {mass, com}, 0.05};
}

std::vector<NamedObject> TrainingObjects() {
  return {Obj("none", 0.0), Obj("50g", 0.05), Obj("100g", 0.10), Obj("150g", 0.15)};
}

TEST(SteadyState, UnloadedArmHasNoDiscrepancy) {
  const ArmModel arm = testing::PlanarArm(3, 0.1);
  Rng rng(1);
  const Eigen::Vector3d q_d(0.1, -0.2, 0.3);
  const SteadySample s =
      SteadyState(arm, Controller(3, 5.0), q_d, Eigen::Vector3d(1, -1, 1), Obj("none", 0.0), rng);
  EXPECT_EQ(s.q, q_d);
  EXPECT_EQ(s.discrepancy(), Eigen::Vector3d::Zero());
}

TEST(SteadyState, SingleJointSag) {
  ArmModel arm = testing::PlanarArm(1, 0.1);
  arm.gravity = Eigen::Vector3d(0, -9.81, 0);
  Rng rng(2);
  const SteadySample s = SteadyState(arm, Controller(1, 10.0), Eigen::VectorXd::Zero(1),
                                     Eigen::VectorXd::Ones(1), Obj("m", 0.1, Eigen::Vector3d::Zero()), rng);
  // kp * e = 0.0981 cos(q) with q = -e
  const double e = s.discrepancy()[0];
  EXPECT_NEAR(e, 0.00981, 1e-6);
  EXPECT_NEAR(10.0 * e, 0.0981 * std::cos(e), 1e-12);
}

TEST(SteadyState, FrictionDirectionOffset) {
  ArmModel arm;  // vertical axis: gravity exerts no torque
  arm.joints.push_back(testing::Joint(Eigen::Vector3d::UnitZ(), Eigen::Vector3d::Zero(), 0.2,
                                      Eigen::Vector3d(0.05, 0, 0)));
  arm.ee_offset.translation = Eigen::Vector3d(0.1, 0, 0);
  const ControllerSpec c = Controller(1, 8.0, 0.04);
  Rng rng(3);
  const Eigen::VectorXd q_d = Eigen::VectorXd::Constant(1, 0.3);
  const auto pos = SteadyState(arm, c, q_d, Eigen::VectorXd::Ones(1), Obj("m", 0.1), rng);
  const auto neg = SteadyState(arm, c, q_d, -Eigen::VectorXd::Ones(1), Obj("m", 0.1), rng);
  EXPECT_NEAR(pos.discrepancy()[0] - neg.discrepancy()[0], 2 * 0.04 / 8.0, 1e-12);
}

TEST(SteadyState, EquilibriumResidual) {
  const ArmModel arm = testing::DefaultArm();
  const ControllerSpec c = Controller(4, 20.0, 0.03, 0.03);
  const Dataset data = GenerateRandomSamples(arm, c, TrainingObjects(), 100, {7, 1});
  ASSERT_EQ(data.samples.size(), 400u);
  for (const auto& s : data.samples) {
    const Eigen::VectorXd lhs = c.kp.cwiseProduct(s.discrepancy());
    const Eigen::VectorXd rhs = s.tau_true + s.rot_dir.cwiseProduct(FrictionMagnitude(c, s.q));
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
    for (int j = 0; j < 4; ++j) EXPECT_TRUE(s.rot_dir[j] == 1.0 || s.rot_dir[j] == -1.0);
  }
}

TEST(SteadyState, HeavierObjectsSagMore) {
  const ArmModel arm = testing::DefaultArm();
  const ControllerSpec c = Controller(4, 20.0);
  for (const Eigen::Vector4d q_d : {Eigen::Vector4d(0, 0, 0, 0), Eigen::Vector4d(0.3, 0.2, 0.1, 0.0),
                                    Eigen::Vector4d(-0.4, 0.5, -0.2, 0.3)}) {
    Eigen::Vector4d previous = Eigen::Vector4d::Zero();
    for (double m : {0.0, 0.05, 0.10, 0.15}) {
      Rng rng(4);
      const auto s = SteadyState(arm, c, q_d, Eigen::Vector4d(1, 1, 1, 1), Obj("m", m), rng);
      const Eigen::Vector4d e = s.discrepancy().cwiseAbs();
      if (m > 0.0) {
        for (int j = 1; j < 4; ++j) EXPECT_GT(e[j], previous[j]) << "joint " << j + 1 << " m=" << m;
      }
      previous = e;
    }
  }
}

TEST(SteadyState, RejectsNonConvergence) {
  const ArmModel arm = testing::DefaultArm();
  Rng rng(5);
  EXPECT_THROW(SteadyState(arm, Controller(4, 0.05), Eigen::Vector4d(0, 0.5, 0.5, 0.5),
                           Eigen::Vector4d(1, 1, 1, 1), Obj("m", 0.15), rng),
               NumericalError);
}

TEST(SteadyState, RejectsBadDirections) {
  const ArmModel arm = testing::DefaultArm();
  Rng rng(6);
  EXPECT_THROW(SteadyState(arm, Controller(4, 20), Eigen::Vector4d::Zero(), Eigen::Vector4d(1, 0, 1, 1),
                           Obj("m", 0.1), rng),
               DataError);
}

TEST(PlanningGrid, SingleJointCount) {
  ArmModel arm = testing::PlanarArm(1, 0.1);
  GridSpec grid{10.0 * M_PI / 180.0, {Eigen::Vector2d(0.0, 20.0 * M_PI / 180.0)}};
  EXPECT_EQ(PlanningGridPositions(arm, grid).size(), 3u);
  const Dataset d = GeneratePlanningGrid(arm, Controller(1, 10.0), TrainingObjects(), grid, {1, 1});
  EXPECT_EQ(d.samples.size(), 3u * 2u * 4u);
}

TEST(PlanningGrid, DeskScaleProductFormula) {
  const ExperimentConfig config = LoadExperimentConfig(testing::ConfigPath("desk.json"));
  const auto positions = PlanningGridPositions(config.arm, config.grid);
  EXPECT_EQ(positions.size(), 5u * 3u * 3u * 3u);
  const Dataset d = GeneratePlanningGrid(config.arm, config.controller, config.training_objects,
                                         config.grid, {config.seed, 1});
  EXPECT_EQ(d.samples.size(), positions.size() * 16u * config.training_objects.size());
  EXPECT_EQ(d.rejected, 0u);
}

TEST(PlanningGrid, FullScaleCounts) {
  const ExperimentConfig config = LoadExperimentConfig(testing::ConfigPath("full_scale.json"));
  const auto positions = PlanningGridPositions(config.arm, config.grid);
  EXPECT_EQ(positions.size() * 16u * config.training_objects.size(), 46144u);
  EXPECT_EQ(config.random_per_object * config.training_objects.size(), 36000u);
}

TEST(PlanningGrid, RejectsBadGrids) {
  ArmModel arm = testing::PlanarArm(1, 0.1);
  EXPECT_THROW(PlanningGridPositions(arm, {0.0, {}}), ConfigError);
  EXPECT_THROW(PlanningGridPositions(arm, {0.3, {Eigen::Vector2d(0.0, 1.0)}}), ConfigError);
  arm.coupled_limits.push_back({Eigen::VectorXd::Ones(1), 5.0, 6.0});
  EXPECT_THROW(PlanningGridPositions(arm, {0.5, {Eigen::Vector2d(0.0, 1.0)}}), ConfigError);
}

TEST(RandomSamples, Counts) {
  const ArmModel arm = testing::DefaultArm();
  const ControllerSpec c = Controller(4, 20.0, 0.03, 0.03, 1e-4, 0.01);
  EXPECT_TRUE(GenerateRandomSamples(arm, c, TrainingObjects(), 0, {1, 1}).samples.empty());
  const Dataset d = GenerateRandomSamples(arm, c, TrainingObjects(), 9000, {1, 4});
  EXPECT_EQ(d.samples.size(), 36000u);
  for (std::size_t i = 0; i < d.samples.size(); i += 997) {
    EXPECT_TRUE(WithinJointLimits(arm, d.samples[i].q_d));
  }
}

std::string Serialize(const Dataset& d) {
  std::ostringstream out;
  WriteDataset(out, {"t", "h", 1, 4, d.samples.size(), d.rejected}, d);
  return out.str();
}

TEST(RandomSamples, DeterministicUnderSeed) {
  const ArmModel arm = testing::DefaultArm();
  const ControllerSpec c = Controller(4, 20.0, 0.03, 0.03, 1e-4, 0.01);
  const std::string a = Serialize(GenerateRandomSamples(arm, c, TrainingObjects(), 200, {42, 1}));
  const std::string b = Serialize(GenerateRandomSamples(arm, c, TrainingObjects(), 200, {42, 1}));
  const std::string parallel = Serialize(GenerateRandomSamples(arm, c, TrainingObjects(), 200, {42, 3}));
  const std::string other = Serialize(GenerateRandomSamples(arm, c, TrainingObjects(), 200, {43, 1}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, parallel);
  EXPECT_NE(a, other);
}

TEST(InferenceWindows, RandomDraws) {
  std::vector<std::size_t> pool(1000);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = 3 * i;
  Rng rng(9);
  const auto windows = MakeInferenceWindows(pool, 64, 1000, WindowMode::kRandom, rng);
  ASSERT_EQ(windows.size(), 1000u);
  for (const auto& w : windows) {
    ASSERT_EQ(w.size(), 64u);
    const std::set<std::size_t> unique(w.begin(), w.end());
    EXPECT_EQ(unique.size(), 64u);
    for (std::size_t i : w) EXPECT_EQ(i % 3, 0u);
  }
  EXPECT_NE(windows[0], windows[1]);
}

TEST(InferenceWindows, WholePoolAndTrajectoryMode) {
  const std::vector<std::size_t> pool{5, 6, 7, 8, 9};
  Rng rng(10);
  const auto whole = MakeInferenceWindows(pool, 5, 3, WindowMode::kRandom, rng);
  ASSERT_EQ(whole.size(), 3u);
  for (const auto& w : whole) EXPECT_EQ(w, pool);

  std::vector<std::size_t> stream(300);
  for (std::size_t i = 0; i < stream.size(); ++i) stream[i] = i;
  const auto sliding = MakeInferenceWindows(stream, 128, 0, WindowMode::kTrajectory, rng);
  ASSERT_EQ(sliding.size(), 300u - 128u + 1u);
  for (std::size_t k = 0; k < sliding.size(); ++k) {
    EXPECT_EQ(sliding[k].front(), k);
    EXPECT_EQ(sliding[k].back(), k + 127);
  }
  EXPECT_THROW(MakeInferenceWindows(pool, 6, 1, WindowMode::kRandom, rng), DataError);
}

TEST(Trajectory, SegmentsAndDirections) {
  const ArmModel arm = testing::DefaultArm();
  TrajectorySpec spec;
  spec.segments = {{Obj("a", 0.05), 50}, {Obj("b", 0.10), 70}};
  const Dataset d = GenerateTrajectory(arm, Controller(4, 20.0, 0.03), spec, {3, 1});
  ASSERT_EQ(d.samples.size(), 120u);
  EXPECT_EQ(d.samples[49].object_id, "a");
  EXPECT_EQ(d.samples[50].object_id, "b");
  EXPECT_EQ(d.samples[119].object.mass, 0.10);
  // consecutive commanded configurations are close
  for (std::size_t i = 1; i < d.samples.size(); ++i) {
    EXPECT_LT((d.samples[i].q_d - d.samples[i - 1].q_d).cwiseAbs().maxCoeff(), 0.05);
  }
  EXPECT_THROW(GenerateTrajectory(arm, Controller(4, 20.0), TrajectorySpec{}, {3, 1}), ConfigError);
}

TEST(Controller, Validation) {
  ControllerSpec c = Controller(4, 20.0);
  EXPECT_NO_THROW(ValidateController(c, 4));
  EXPECT_THROW(ValidateController(c, 3), ConfigError);
  c.kp[1] = 0.0;
  EXPECT_THROW(ValidateController(c, 4), ConfigError);
  c = Controller(4, 20.0);
  c.sensor_noise_sd = -1.0;
  EXPECT_THROW(ValidateController(c, 4), ConfigError);
}

}  // namespace
}  // namespace inertia
