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

#include "inertia/torque_model.h"

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "inertia/config.h"
#include "inertia/errors.h"
#include "inertia/metrics.h"
#include "inertia/sim.h"
#include "test_util.h"

namespace inertia {
namespace {

SteadySample Sample(const Eigen::Vector2d& q_d, const Eigen::Vector2d& q, const Eigen::Vector2d& dir) {
  SteadySample s;
  s.q_d = q_d;
  s.q = q;
  s.rot_dir = dir;
  s.tau_true = Eigen::Vector2d::Zero();
  return s;
}

JointNormalization TwoJointNorm() {
  JointNormalization n;
  n.q_min = Eigen::Vector2d(-1.0, 0.0);
  n.q_max = Eigen::Vector2d(1.0, 2.0);
  n.error_scale = Eigen::Vector2d(0.1, 0.2);
  n.torque_scale = Eigen::Vector2d(1.0, 1.0);
  return n;
}

TEST(EncodeJointState, RangeEndsAndDirection) {
  const JointNormalization norm = TwoJointNorm();
  const SteadySample lo = Sample({-1.0, 0.0}, {-1.0, 0.0}, {1.0, 1.0});
  EXPECT_EQ(EncodeJointState(lo, 0, norm), Eigen::Vector4d(0, 0, 1, 0));
  const SteadySample hi = Sample({1.05, 2.0}, {1.0, 2.0}, {-1.0, -1.0});
  const Eigen::Vector4d e = EncodeJointState(hi, 0, norm);
  EXPECT_EQ(e[0], 1.0);
  EXPECT_NEAR(e[1], 0.5, 1e-12);
  EXPECT_EQ(e[2], 0.0);
  EXPECT_EQ(e[3], 1.0);
}

TEST(EncodeJointState, ClampsAndCounts) {
  const JointNormalization norm = TwoJointNorm();
  ClampCounter counter;
  const SteadySample out = Sample({3.0, 1.0}, {2.0, 1.0}, {1.0, -1.0});
  const Eigen::Vector4d e = EncodeJointState(out, 0, norm, &counter);
  EXPECT_EQ(e[0], 1.0);
  EXPECT_EQ(e[1], 1.0);
  EXPECT_EQ(counter.clamped, 2u);
  EncodeJointState(out, 1, norm, &counter);
  EXPECT_EQ(counter.clamped, 2u);
}

TEST(TorqueModel, ZeroInitialisedOutputsZero) {
  Rng rng(1);
  const TorqueModel model = MakeTorqueModel(TwoJointNorm(), rng);
  EXPECT_EQ(model.estimator.input_dim(), 2 * 12);
  EXPECT_EQ(model.estimator.dims(), (std::vector<int>{24, 64, 64, 2}));
  EXPECT_EQ(model.rep[0].dims(), (std::vector<int>{4, 12, 12}));
  EXPECT_NE(model.rep[0].weights[0], model.rep[1].weights[0]);
  EXPECT_EQ(EstimateTorque(model, Sample({0.1, 0.5}, {0.09, 0.4}, {1, -1})), Eigen::Vector2d::Zero());
}

struct Fixture {
  ExperimentConfig config;
  std::vector<SteadySample> train;
  std::vector<SteadySample> test;
};

const Fixture& Data() {
  static const Fixture f = [] {
    Fixture f;
    f.config = LoadExperimentConfig(testing::ConfigPath("desk.json"));
    f.train = GenerateRandomSamples(f.config.arm, f.config.controller, f.config.training_objects,
                                    1500, {11, 1}).samples;
    f.test = GenerateRandomSamples(f.config.arm, f.config.controller, f.config.testing_objects,
                                   250, {12, 1}).samples;
    return f;
  }();
  return f;
}

const TorqueTrainingResult& Trained() {
  static const TorqueTrainingResult r = TrainTorqueModel(Data().train, {128, 150, 3e-3, true}, 13);
  return r;
}

TEST(TorqueModel, BatchPermutationDoesNotChangeEstimates) {
  const auto& model = Trained().model;
  const auto& test = Data().test;
  std::vector<std::size_t> idx(50);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const Eigen::MatrixXd a = EstimateTorques(model, test, idx);
  std::vector<std::size_t> rev(idx.rbegin(), idx.rend());
  const Eigen::MatrixXd b = EstimateTorques(model, test, rev);
  for (int k = 0; k < 50; ++k) {
    EXPECT_LT((a.col(k) - b.col(49 - k)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((a.col(k) - EstimateTorque(model, test[k])).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(TorqueModel, LearnsSyntheticTorques) {
  const auto& r = Trained();
  EXPECT_LT(r.trace.back().train_loss, r.trace.front().train_loss);
  EXPECT_FALSE(std::isnan(r.trace.back().holdout_loss));
  const auto& test = Data().test;
  const Eigen::MatrixXd tau = EstimateTorques(r.model, test);
  const Eigen::VectorXd scale = MaxJointTorque(test);
  for (int j = 0; j < 4; ++j) {
    std::vector<double> err;
    for (std::size_t i = 0; i < test.size(); ++i) err.push_back(std::abs(tau(j, i) - test[i].tau_true[j]));
    EXPECT_LT(MetricsFromErrors(err, scale[j]).nmae_percent, 5.0) << "joint " << j + 1;
  }
}

TEST(TorqueModel, BeatsPositionErrorBaselineUnderPositionFriction) {
  const auto& r = Trained();
  const auto& test = Data().test;
  const BaselineParams pe = FitBaseline(BaselineKind::kPositionError, Data().train);
  const Eigen::MatrixXd tau = EstimateTorques(r.model, test);
  const Eigen::MatrixXd base = PredictBaseline(pe, test);
  for (int j = 0; j < 4; ++j) {
    double model_err = 0, pe_err = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      model_err += std::abs(tau(j, i) - test[i].tau_true[j]);
      pe_err += std::abs(base(j, i) - test[i].tau_true[j]);
    }
    EXPECT_LT(model_err, pe_err) << "joint " << j + 1;
  }
}

TEST(TorqueModel, NoiseAndFrictionFreeDataIsExactForPositionError) {
  // the position-error model is the exact generator here, so it is the floor
  ExperimentConfig config = Data().config;
  config.controller.friction_coulomb.setZero();
  config.controller.friction_position_gain.setZero();
  config.controller.encoder_noise_sd.setZero();
  const auto data = GenerateRandomSamples(config.arm, config.controller, config.training_objects,
                                          200, {14, 1}).samples;
  const BaselineParams pe = FitBaseline(BaselineKind::kPositionError, data);
  const Eigen::MatrixXd base = PredictBaseline(pe, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_LT((base.col(i) - data[i].tau_true).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TorqueModel, LinearTargetsAreRealisable) {
  // tau_true exactly linear in the (unclamped) scaled position error
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SteadySample> data;
  for (int i = 0; i < 2000; ++i) {
    SteadySample s;
    s.q_d = Eigen::Vector2d(u(rng), u(rng));
    s.q = s.q_d - 0.01 * Eigen::Vector2d(u(rng), u(rng));
    s.rot_dir = Eigen::Vector2d(u(rng) > 0 ? 1.0 : -1.0, u(rng) > 0 ? 1.0 : -1.0);
    const Eigen::Vector2d e = s.discrepancy();
    s.tau_true = Eigen::Vector2d(0.5 * e[0] - 0.2 * e[1], 0.3 * e[1] + 0.1 * e[0]);
    data.push_back(s);
  }
  const auto r = TrainTorqueModel(data, {32, 600, 3e-3, true}, 16, 0.0);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_LT(TorqueBatchLoss(r.model, data, all, nullptr), 1e-6);
}

TEST(TorqueModel, LossGradientMatchesFiniteDifferences) {
  Rng rng(17);
  const auto& train = Data().train;
  TorqueModel model = MakeTorqueModel(FitNormalization(train), rng, {{5}, 6, {7}});
  // give the zero-initialised output layer some weight so every path is live
  std::normal_distribution<double> n(0.0, 0.3);
  for (int k = 0; k < model.estimator.weights.back().size(); ++k) model.estimator.weights.back().data()[k] = n(rng);
  const std::vector<std::size_t> batch{0, 700, 1400, 2100, 2800, 3500};
  std::vector<Mlp> grads;
  for (Mlp* p : model.Parameters()) grads.push_back(ZerosLike(*p));
  TorqueBatchLoss(model, train, batch, &grads);
  auto params = model.Parameters();
  const double eps = 1e-6;
  int checked = 0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (int l = 0; l < params[b]->num_layers(); ++l) {
      auto& w = params[b]->weights[l];
      for (int k = 0; k < w.size(); k += 3) {
        const double saved = w.data()[k];
        w.data()[k] = saved + eps;
        const double lp = TorqueBatchLoss(model, train, batch, nullptr);
        w.data()[k] = saved - eps;
        const double lm = TorqueBatchLoss(model, train, batch, nullptr);
        w.data()[k] = saved;
        const double fd = (lp - lm) / (2 * eps);
        const double an = grads[b].weights[l].data()[k];
        EXPECT_LT(std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-4}), 1e-4);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(TorqueModel, CheckpointRoundTripAndNormalisationRequired) {
  const auto& r = Trained();
  const nlohmann::json j = TorqueModelToJson(r.model, &r.optimizer);
  const TorqueModel back = TorqueModelFromJson(j);
  const auto& test = Data().test;
  EXPECT_EQ(EstimateTorques(back, test), EstimateTorques(r.model, test));
  nlohmann::json stripped = j;
  stripped.erase("normalization");
  EXPECT_THROW(TorqueModelFromJson(stripped), DataError);
}

TEST(TorqueModel, EmptyDatasetThrows) {
  EXPECT_THROW(TrainTorqueModel({}, {}, 1), DataError);
}

}  // namespace
}  // namespace inertia
