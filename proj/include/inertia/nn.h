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

#ifndef INERTIA_NN_H_
#define INERTIA_NN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "inertia/rng.h"

namespace inertia {

// Fully connected network, ReLU on hidden layers, identity output.
// weights[l] is out_l x in_l. The same type doubles as a gradient container.
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  std::vector<int> dims() const;
  std::size_t num_parameters() const;
  void SetZero();
  bool AllFinite() const;
};

enum class OutputInit {
  kRandom,
  // final layer starts at zero, so the untrained network outputs zero
  kZero,
};

// Uniform He initialisation, zero biases.
Mlp MakeMlp(const std::vector<int>& dims, Rng& rng, OutputInit output_init = OutputInit::kRandom);
Mlp ZerosLike(const Mlp& mlp);

// Layer inputs recorded by the batched forward pass, used by backward.
struct MlpTape {
  std::vector<Eigen::MatrixXd> layer_inputs;
};

// Columns are samples.
Eigen::MatrixXd MlpForwardBatch(const Mlp& mlp, const Eigen::MatrixXd& input,
                                MlpTape* tape = nullptr);
// Accumulates parameter gradients into *grad and returns d loss / d input.
Eigen::MatrixXd MlpBackwardBatch(const Mlp& mlp, const MlpTape& tape,
                                 const Eigen::MatrixXd& upstream, Mlp* grad);

Eigen::VectorXd MlpForward(const Mlp& mlp, const Eigen::VectorXd& input);

struct MlpGradients {
  Mlp params;
  Eigen::VectorXd input;
};
MlpGradients MlpBackward(const Mlp& mlp, const Eigen::VectorXd& input,
                         const Eigen::VectorXd& upstream);

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Mlp> first_moment;
  std::vector<Mlp> second_moment;
};

AdamState MakeAdamState(const std::vector<Mlp*>& params, double learning_rate);

// Bias-corrected Adam update of every parameter in `params`.
void AdamStep(const std::vector<Mlp*>& params, const std::vector<Mlp>& grads, AdamState& state);

struct TrainSchedule {
  int batch_size = 256;
  int epochs = 300;
  double learning_rate = 3e-4;  // initial rate
  bool cosine_decay = false;     // anneal per epoch towards zero
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;  // NaN when no holdout is configured
};

// Computes the mean loss over `batch` and writes its gradient into `grads`
// (pre-zeroed, one entry per parameter block, same order as Train's params).
using BatchObjective =
    std::function<double(std::span<const std::size_t> batch, std::vector<Mlp>& grads)>;

struct TrainHooks {
  std::function<void(int epoch, Rng& rng)> on_epoch_begin;
  std::function<double()> holdout_loss;
};

// Mini-batch training: indices 0..dataset_size-1 are reshuffled every epoch.
// Returns the per-epoch mean training loss (batch losses weighted by size).
std::vector<EpochRecord> Train(const std::vector<Mlp*>& params, AdamState& state,
                               std::size_t dataset_size, const BatchObjective& objective,
                               const TrainSchedule& schedule, Rng& rng,
                               const TrainHooks& hooks = {});

nlohmann::json MlpToJson(const Mlp& mlp);
Mlp MlpFromJson(const nlohmann::json& j);
nlohmann::json AdamToJson(const AdamState& state);
AdamState AdamFromJson(const nlohmann::json& j);

}  // namespace inertia

#endif  // INERTIA_NN_H_
