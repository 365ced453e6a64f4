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

#include "inertia/identify.h"

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "inertia/errors.h"
#include "inertia/sim.h"
#include "inertia/statics.h"
#include "test_util.h"

namespace inertia {
namespace {

using testing::DefaultArm;

ControllerSpec Stiff(int n) {
  ControllerSpec c;
  c.kp = Eigen::VectorXd::Constant(n, 20.0);
  c.friction_coulomb = Eigen::VectorXd::Constant(n, 0.03);
  c.friction_position_gain = Eigen::VectorXd::Constant(n, 0.03);
  c.encoder_noise_sd = Eigen::VectorXd::Constant(n, 1e-4);
  c.sensor_bias = Eigen::VectorXd::Zero(n);
  return c;
}

Eigen::MatrixXd TrueTorques(std::span<const SteadySample> samples) {
  Eigen::MatrixXd t(samples.front().tau_true.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) t.col(i) = samples[i].tau_true;
  return t;
}

InertialVector X(const ObjectSpec& o) {
  InertialVector x;
  x << o.mass, o.mass * o.com_tag;
  return x;
}

TEST(BuildB, TagAtEndEffector) {
  const Matrix64 b = BuildB(Eigen::Vector3d(0, 0, -9.81), Pose{}, Eigen::Vector3d::Zero());
  Eigen::Matrix<double, 6, 1> first;
  first << 0, 0, 9.81, 0, 0, 0;
  EXPECT_EQ(b.col(0), first);
  EXPECT_EQ((b.topRightCorner<3, 3>()), Eigen::Matrix3d::Zero());
  Eigen::Matrix3d br;
  br << 0, 9.81, 0, -9.81, 0, 0, 0, 0, 0;
  EXPECT_TRUE((b.bottomRightCorner<3, 3>().isApprox(br, 1e-15)));
}

TEST(BuildB, ZeroGravity) {
  Pose tag;
  tag.rotation = RotationFromRpy(0.3, 0.2, 0.1);
  tag.translation = Eigen::Vector3d(0.1, 0.2, 0.3);
  EXPECT_EQ(BuildB(Eigen::Vector3d::Zero(), tag, Eigen::Vector3d(0.05, 0, 0)), Matrix64::Zero());
}

TEST(BuildB, ReproducesEnvironmentWrench) {
  const ArmModel arm = DefaultArm();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd q = testing::RandomQ(arm, rng);
    const ObjectSpec obj = testing::RandomObject(rng);
    const auto frames = ForwardKinematics(arm, q);
    const Matrix64 b =
        BuildB(arm.gravity, frames[TagFrame(arm)], frames[EndEffectorFrame(arm)].translation);
    const Eigen::Matrix<double, 6, 1> wrench = EnvironmentWrench(ObjectWrench(arm, q, obj));
    EXPECT_LT((b * X(obj) - wrench).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BuildA, ZeroJacobianAndShapes) {
  const Matrix64 b = Matrix64::Random();
  EXPECT_EQ(BuildA(Eigen::MatrixXd::Zero(6, 3), b), Eigen::MatrixXd::Zero(3, 4));
  EXPECT_THROW(BuildA(Eigen::MatrixXd::Zero(5, 3), b), DataError);
}

TEST(BuildA, MatchesStaticsForRandomSamples) {
  const ArmModel arm = DefaultArm();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd q = testing::RandomQ(arm, rng);
    const ObjectSpec obj = testing::RandomObject(rng);
    const Eigen::VectorXd tau = StaticJointTorques(arm, q, ObjectWrench(arm, q, obj));
    const auto frames = ForwardKinematics(arm, q);
    const Eigen::MatrixXd a = BuildA(
        Jacobian(arm, frames),
        BuildB(arm.gravity, frames[TagFrame(arm)], frames[EndEffectorFrame(arm)].translation));
    worst = std::max(worst, (a * X(obj) - (tau - FreeMotionTorques(arm, q))).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(BuildA, SingleJointMassSlope) {
  ArmModel arm = testing::PlanarArm(1, 0.1);
  arm.gravity = Eigen::Vector3d(0, -9.81, 0);
  SteadySample s;
  s.q_d = s.q = Eigen::VectorXd::Zero(1);
  s.rot_dir = Eigen::VectorXd::Ones(1);
  s.tag_pose = ForwardKinematics(arm, s.q)[TagFrame(arm)];
  const SampleRegressor r = ComputeRegressor(arm, s);
  EXPECT_NEAR(r.a(0, 0), 0.981, 1e-15);
}

struct WindowFixture {
  ArmModel arm = DefaultArm();
  ObjectSpec obj{0.0733, Eigen::Vector3d(0.012, -0.006, -0.018)};
  std::vector<SteadySample> samples;
  WindowFixture() {
    samples = GenerateRandomSamples(arm, Stiff(4), {{"o", obj, 0.07}}, 64, {3, 1}).samples;
  }
};

TEST(StackSystem, ShapesAndOrdering) {
  WindowFixture f;
  const auto regs = ComputeRegressors(f.arm, f.samples);
  const Eigen::MatrixXd tau = TrueTorques(f.samples);
  const IdentSystem one = StackSystem(regs, std::vector<std::size_t>{5}, tau.col(5));
  EXPECT_EQ(one.a.rows(), 4);
  std::vector<std::size_t> all(64);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const IdentSystem full = StackSystem(regs, all, tau);
  EXPECT_EQ(full.a.rows(), 256);
  EXPECT_EQ(full.a.cols(), 4);
  // rows sample-major, joint-minor
  EXPECT_EQ(full.a.row(4 * 7 + 2), regs[7].a.row(2));
  EXPECT_EQ(full.residual[4 * 7 + 2], tau(2, 7) - regs[7].tau_g[2]);
  EXPECT_THROW(StackSystem(regs, all, tau.leftCols(10)), DataError);
  EXPECT_THROW(StackSystem(regs, all, tau, Eigen::VectorXd::Ones(5)), DataError);
}

TEST(SolveWls, ExactlyDeterminedIdentity) {
  IdentSystem s{Eigen::MatrixXd::Identity(4, 4), Eigen::Vector4d(1, 2, 3, 4), Eigen::Vector4d::Ones()};
  const InertialEstimate e = SolveWls(s);
  EXPECT_LT((e.x - Eigen::Vector4d(1, 2, 3, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(e.mass, e.x[0]);
  ASSERT_TRUE(e.com_tag.has_value());
  EXPECT_LT((*e.com_tag - Eigen::Vector3d(2, 3, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(e.condition_number, 1.0, 1e-12);
}

TEST(SolveWls, ExactRecoveryFromAnalyticTorques) {
  const ArmModel arm = DefaultArm();
  ControllerSpec exact = Stiff(4);
  exact.encoder_noise_sd.setZero();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ObjectSpec obj = testing::RandomObject(rng);
    const auto samples = GenerateRandomSamples(arm, exact, {{"o", obj, 0.07}}, 64, {100u + trial, 1}).samples;
    const InertialEstimate e = SolveWls(StackSystem(arm, samples, TrueTorques(samples)));
    EXPECT_LT(std::abs(e.mass - obj.mass) / obj.mass, 1e-9);
    EXPECT_LT((*e.com_tag - obj.com_tag).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SolveWls, NormalEquationsAndWeightInvariance) {
  WindowFixture f;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  Eigen::MatrixXd tau = TrueTorques(f.samples);
  for (int k = 0; k < tau.size(); ++k) tau.data()[k] += noise(rng);
  Eigen::VectorXd weights(256);
  for (int k = 0; k < 256; ++k) weights[k] = w(rng);
  const IdentSystem s = StackSystem(f.arm, f.samples, tau, weights);
  const InertialEstimate e = SolveWls(s);
  const Eigen::Vector4d orth = s.a.transpose() * s.weights.asDiagonal() * (s.a * e.x - s.residual);
  EXPECT_LT(orth.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_GE(e.condition_number, 1.0);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    IdentSystem scaled = s;
    scaled.weights *= c;
    EXPECT_LT((SolveWls(scaled).x - e.x).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SolveWls, PermutationInvariance) {
  WindowFixture f;
  const auto regs = ComputeRegressors(f.arm, f.samples);
  Eigen::MatrixXd tau = TrueTorques(f.samples) + 0.01 * Eigen::MatrixXd::Random(4, 64);
  std::vector<std::size_t> order(64);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::VectorXd w = (Eigen::VectorXd::Random(256).array() + 1.5).matrix();
  const InertialEstimate base = SolveWls(StackSystem(regs, order, tau, w));
  std::mt19937_64 rng(6);
  std::vector<std::size_t> perm = order;
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd tau_p(4, 64);
  Eigen::VectorXd w_p(256);
  for (int k = 0; k < 64; ++k) {
    tau_p.col(k) = tau.col(perm[k]);
    w_p.segment(4 * k, 4) = w.segment(4 * perm[k], 4);
  }
  const InertialEstimate permuted = SolveWls(StackSystem(regs, perm, tau_p, w_p));
  EXPECT_LT((permuted.x - base.x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveWls, SingleConfigurationIsRankDeficient) {
  const ArmModel arm = DefaultArm();
  ControllerSpec c = Stiff(4);
  c.encoder_noise_sd.setZero();
  NamedObject obj{"o", {0.1, Eigen::Vector3d(0.01, 0, -0.02)}, 0.07};
  Rng rng(7);
  const SteadySample s = SteadyState(arm, c, Eigen::Vector4d(0.2, 0.3, -0.4, 0.1), Eigen::Vector4d(1, 1, 1, 1), obj, rng);
  const std::vector<SteadySample> window(16, s);
  try {
    SolveWls(StackSystem(arm, window, TrueTorques(window)));
    FAIL() << "expected a rank-deficiency error";
  } catch (const RankDeficiencyError& e) {
    // the COM shift along gravity, expressed in the tag frame, is invisible
    Eigen::Vector4d expected;
    expected << 0.0, s.tag_pose.rotation.transpose() * arm.gravity.normalized();
    EXPECT_NEAR(std::abs(e.direction().dot(expected)), 1.0, 1e-6);
    EXPECT_GT(e.condition_number(), 1e10);
  }
}

TEST(SolveWls, MassFloorAndKnownMass) {
  IdentSystem s{Eigen::MatrixXd::Identity(4, 4), Eigen::Vector4d(5e-5, 1e-6, 2e-6, 3e-6),
                Eigen::Vector4d::Ones()};
  EXPECT_FALSE(SolveWls(s).com_tag.has_value());
  WlsOptions known;
  known.known_mass = 0.5;
  s.residual << 0.4, 0.05, 0.1, -0.05;
  const InertialEstimate e = SolveWls(s, known);
  EXPECT_LT((*e.com_tag - Eigen::Vector3d(0.1, 0.2, -0.1)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(e.mass, 0.4, 1e-15);
}

TEST(SolveWls, RejectsInvalidSystems) {
  IdentSystem s{Eigen::MatrixXd::Identity(4, 4), Eigen::Vector4d::Ones(), Eigen::Vector4d(1, 1, 0, 1)};
  EXPECT_THROW(SolveWls(s), DataError);
  IdentSystem small{Eigen::MatrixXd::Identity(3, 4), Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones()};
  EXPECT_THROW(SolveWls(small), DataError);
}

TEST(WlsWeightGradient, MatchesFiniteDifferences) {
  WindowFixture f;
  std::vector<SteadySample> few(f.samples.begin(), f.samples.begin() + 4);
  Eigen::MatrixXd tau = TrueTorques(few) + 0.02 * Eigen::MatrixXd::Random(4, 4);
  Eigen::VectorXd w = (Eigen::VectorXd::Random(16).array() + 1.5).matrix();
  const IdentSystem s = StackSystem(f.arm, few, tau, w);
  const InertialVector c(0.3, -1.0, 2.0, 0.5);  // L = c . x_hat
  const InertialEstimate e = SolveWls(s);
  const Eigen::VectorXd g = WlsWeightGradient(s, e.x, c);
  for (int k = 0; k < 16; ++k) {
    const double eps = 1e-6 * s.weights[k];
    IdentSystem p = s, m = s;
    p.weights[k] += eps;
    m.weights[k] -= eps;
    const double fd = (c.dot(SolveWls(p).x) - c.dot(SolveWls(m).x)) / (2 * eps);
    EXPECT_LT(std::abs(fd - g[k]) / std::max({std::abs(fd), std::abs(g[k]), 1e-8}), 1e-5) << k;
  }
}

}  // namespace
}  // namespace inertia
