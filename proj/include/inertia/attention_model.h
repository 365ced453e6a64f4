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

#ifndef INERTIA_ATTENTION_MODEL_H_
#define INERTIA_ATTENTION_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "inertia/identify.h"
#include "inertia/nn.h"
#include "inertia/torque_model.h"

namespace inertia {

struct AttentionArchitecture {
  std::vector<int> rep_hidden{12};
  int embedding = 12;
  std::vector<int> scorer_hidden{32};
};

// Per-joint representation MLPs (not shared with the torque model), a scorer
// shared across joints that sees [embedding, joint one-hot], and a softmax
// over the joints of each sample.
struct AttentionModel {
  std::vector<Mlp> rep;
  Mlp scorer;
  JointNormalization norm;
  std::string torque_model_hash;  // checkpoint the model was trained against

  int n_joints() const { return static_cast<int>(rep.size()); }
  int embedding_dim() const { return rep.front().output_dim(); }
  std::vector<Mlp*> Parameters();
};

// Scorer output layer starts at zero, i.e. uniform weights.
AttentionModel MakeAttentionModel(const JointNormalization& norm, Rng& rng,
                                  const AttentionArchitecture& arch = {});

// Max-subtracted softmax.
Eigen::VectorXd Softmax(const Eigen::VectorXd& scores);

// N x |batch| raw scores and per-sample softmax weights.
Eigen::MatrixXd JointScores(const AttentionModel& model, std::span<const SteadySample> samples,
                            std::span<const std::size_t> batch);
Eigen::MatrixXd JointWeightsBatch(const AttentionModel& model,
                                  std::span<const SteadySample> samples,
                                  std::span<const std::size_t> batch);

// Positive weights summing to one.
Eigen::VectorXd JointWeights(const AttentionModel& model, const SteadySample& sample);

// Diagonal of W for a window: w_1 || ... || w_M (sample-major, joint-minor).
Eigen::VectorXd WeightMatrix(const AttentionModel& model, std::span<const SteadySample> window);
Eigen::VectorXd WeightMatrix(const AttentionModel& model, std::span<const SteadySample> samples,
                             std::span<const std::size_t> window);

struct AttentionLossWeights {
  double mass = 1.0;
  double com = 0.3;
};

// Precomputed, frozen inputs of attention training: regressors and torque
// model estimates for every sample.
struct AttentionTrainingSet {
  std::span<const SteadySample> samples;
  std::vector<SampleRegressor> regressors;
  Eigen::MatrixXd torque_estimates;  // N x samples
};

AttentionTrainingSet MakeAttentionTrainingSet(const ArmModel& arm, const TorqueModel& torque,
                                              std::span<const SteadySample> samples);

struct WindowBatchResult {
  double loss = 0.0;         // mean over solved windows
  std::size_t skipped = 0;   // singular windows
};

// Loss of a batch of windows: estimate weights, solve WLS (COM divided by the
// true mass), L = w_m (m_hat - m)^2 + w_com |com_hat - com|^2. When grads is
// given, back-propagates through the closed-form WLS solution.
WindowBatchResult AttentionWindowLoss(const AttentionModel& model, const AttentionTrainingSet& set,
                                      std::span<const std::vector<std::size_t>> windows,
                                      const AttentionLossWeights& loss_weights,
                                      const WlsOptions& wls, std::vector<Mlp>* grads);

struct AttentionTrainingOptions {
  TrainSchedule schedule{32, 30, 1e-4};
  AttentionLossWeights loss_weights;
  std::size_t window = 64;
  std::size_t windows_per_object = 500;  // redrawn every epoch
  WlsOptions wls;
  std::uint64_t seed = 0;
};

struct AttentionTrainingResult {
  AttentionModel model;
  AdamState optimizer;
  std::vector<EpochRecord> trace;
  std::size_t skipped_windows = 0;
};

// Trains on single-object windows of the objects with mass above the floor.
AttentionTrainingResult TrainAttention(AttentionModel model, const ArmModel& arm,
                                       const TorqueModel& torque,
                                       std::span<const SteadySample> samples,
                                       const AttentionTrainingOptions& options);

nlohmann::json AttentionModelToJson(const AttentionModel& model, const AdamState* optimizer);
AttentionModel AttentionModelFromJson(const nlohmann::json& j);

}  // namespace inertia

#endif  // INERTIA_ATTENTION_MODEL_H_
