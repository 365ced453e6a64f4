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

#ifndef INERTIA_TORQUE_MODEL_H_
#define INERTIA_TORQUE_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "inertia/nn.h"
#include "inertia/sim.h"

namespace inertia {

// Input/output scaling fitted on the training set and stored with the model.
struct JointNormalization {
  Eigen::VectorXd q_min, q_max;   // min-max bounds of measured q
  Eigen::VectorXd error_scale;    // max |q_d - q|
  Eigen::VectorXd torque_scale;   // max |tau_true|

  int n_joints() const { return static_cast<int>(q_min.size()); }
};

JointNormalization FitNormalization(std::span<const SteadySample> samples);
nlohmann::json NormalizationToJson(const JointNormalization& norm);
JointNormalization NormalizationFromJson(const nlohmann::json& j);

inline constexpr int kJointStateDim = 4;

// Counts inputs that fell outside the normalisation range and were clamped.
struct ClampCounter {
  std::size_t clamped = 0;
};

// [normalised q, scaled (q_d - q), direction one-hot: (1,0) positive, (0,1) negative]
Eigen::Vector4d EncodeJointState(const SteadySample& sample, int joint,
                                 const JointNormalization& norm, ClampCounter* counter = nullptr);

// 4 x M matrix of encoded states of one joint for a batch of samples.
Eigen::MatrixXd EncodeJointBatch(std::span<const SteadySample> samples,
                                 std::span<const std::size_t> batch, int joint,
                                 const JointNormalization& norm, ClampCounter* counter = nullptr);

struct TorqueArchitecture {
  std::vector<int> rep_hidden{12};
  int embedding = 12;
  std::vector<int> estimator_hidden{64, 64};
};

// Per-joint representation MLPs feeding a shared estimator MLP over the
// concatenated embeddings.
struct TorqueModel {
  std::vector<Mlp> rep;
  Mlp estimator;
  JointNormalization norm;

  int n_joints() const { return static_cast<int>(rep.size()); }
  int embedding_dim() const { return rep.front().output_dim(); }
  std::vector<Mlp*> Parameters();
};

// Estimator output layer starts at zero.
TorqueModel MakeTorqueModel(const JointNormalization& norm, Rng& rng,
                            const TorqueArchitecture& arch = {});

// External joint torque estimate (N m) for one sample.
Eigen::VectorXd EstimateTorque(const TorqueModel& model, const SteadySample& sample);

// N x |batch| torque estimates in N m.
Eigen::MatrixXd EstimateTorques(const TorqueModel& model, std::span<const SteadySample> samples,
                                std::span<const std::size_t> batch, ClampCounter* counter = nullptr);
Eigen::MatrixXd EstimateTorques(const TorqueModel& model, std::span<const SteadySample> samples);

// Mean over joints and batch of the squared error in scaled torque units;
// gradient written into grads (rep modules first, estimator last).
double TorqueBatchLoss(const TorqueModel& model, std::span<const SteadySample> samples,
                       std::span<const std::size_t> batch, std::vector<Mlp>* grads);

struct TorqueTrainingResult {
  TorqueModel model;
  AdamState optimizer;
  std::vector<EpochRecord> trace;
};

// Holds out `holdout_fraction` of the samples for a diagnostic loss column;
// the holdout never influences the parameters.
TorqueTrainingResult TrainTorqueModel(std::span<const SteadySample> samples,
                                      const TrainSchedule& schedule, std::uint64_t seed,
                                      double holdout_fraction = 0.1,
                                      const TorqueArchitecture& arch = {});

nlohmann::json TorqueModelToJson(const TorqueModel& model, const AdamState* optimizer);
TorqueModel TorqueModelFromJson(const nlohmann::json& j);

}  // namespace inertia

#endif  // INERTIA_TORQUE_MODEL_H_
