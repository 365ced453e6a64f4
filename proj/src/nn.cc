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

#include "inertia/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "inertia/errors.h"

namespace inertia {
namespace {

void CheckSameShape(const Mlp& a, const Mlp& b) {
  bool ok = a.num_layers() == b.num_layers();
  for (int l = 0; ok && l < a.num_layers(); ++l) {
    ok = a.weights[l].rows() == b.weights[l].rows() && a.weights[l].cols() == b.weights[l].cols() &&
         a.biases[l].size() == b.biases[l].size();
  }
  if (!ok) throw DataError("parameter/gradient shape mismatch");
}

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto flat = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw DataError("checkpoint array has wrong size");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  }
  return m;
}

}  // namespace

std::vector<int> Mlp::dims() const {
  std::vector<int> d;
  if (weights.empty()) return d;
  d.push_back(input_dim());
  for (const auto& w : weights) d.push_back(static_cast<int>(w.rows()));
  return d;
}

std::size_t Mlp::num_parameters() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

void Mlp::SetZero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

bool Mlp::AllFinite() const {
  for (int l = 0; l < num_layers(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

Mlp MakeMlp(const std::vector<int>& dims, Rng& rng, OutputInit output_init) {
  if (dims.size() < 2) throw ConfigError("an MLP needs at least input and output dims");
  for (int d : dims) {
    if (d <= 0) throw ConfigError("MLP layer dims must be positive");
  }
  Mlp mlp;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double bound = std::sqrt(6.0 / dims[l]);
    std::uniform_real_distribution<double> uniform(-bound, bound);
    Eigen::MatrixXd w(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng);
    }
    const bool last = l + 2 == dims.size();
    if (last && output_init == OutputInit::kZero) w.setZero();
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  return mlp;
}

Mlp ZerosLike(const Mlp& mlp) {
  Mlp z = mlp;
  z.SetZero();
  return z;
}

Eigen::MatrixXd MlpForwardBatch(const Mlp& mlp, const Eigen::MatrixXd& input, MlpTape* tape) {
  if (input.rows() != mlp.input_dim()) {
    throw DataError("MLP input has " + std::to_string(input.rows()) + " rows, expected " +
                    std::to_string(mlp.input_dim()));
  }
  if (tape) tape->layer_inputs.clear();
  Eigen::MatrixXd x = input;
  for (int l = 0; l < mlp.num_layers(); ++l) {
    Eigen::MatrixXd y = mlp.weights[l] * x;
    y.colwise() += mlp.biases[l];
    if (l + 1 < mlp.num_layers()) y = y.cwiseMax(0.0);
    if (tape) tape->layer_inputs.push_back(std::move(x));
    x = std::move(y);
  }
  return x;
}

Eigen::MatrixXd MlpBackwardBatch(const Mlp& mlp, const MlpTape& tape,
                                 const Eigen::MatrixXd& upstream, Mlp* grad) {
  if (static_cast<int>(tape.layer_inputs.size()) != mlp.num_layers()) {
    throw DataError("MLP tape does not match network");
  }
  if (upstream.rows() != mlp.output_dim() || upstream.cols() != tape.layer_inputs[0].cols()) {
    throw DataError("MLP upstream gradient has wrong shape");
  }
  CheckSameShape(mlp, *grad);
  Eigen::MatrixXd delta = upstream;
  for (int l = mlp.num_layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = tape.layer_inputs[l];
    grad->weights[l].noalias() += delta * in.transpose();
    grad->biases[l] += delta.rowwise().sum();
    Eigen::MatrixXd d_in = mlp.weights[l].transpose() * delta;
    if (l > 0) d_in = d_in.cwiseProduct((in.array() > 0.0).cast<double>().matrix());
    delta = std::move(d_in);
  }
  return delta;
}

Eigen::VectorXd MlpForward(const Mlp& mlp, const Eigen::VectorXd& input) {
  return MlpForwardBatch(mlp, input);
}

MlpGradients MlpBackward(const Mlp& mlp, const Eigen::VectorXd& input,
                         const Eigen::VectorXd& upstream) {
  MlpTape tape;
  MlpForwardBatch(mlp, input, &tape);
  MlpGradients g{ZerosLike(mlp), {}};
  g.input = MlpBackwardBatch(mlp, tape, upstream, &g.params);
  return g;
}

AdamState MakeAdamState(const std::vector<Mlp*>& params, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  for (const Mlp* p : params) {
    state.first_moment.push_back(ZerosLike(*p));
    state.second_moment.push_back(ZerosLike(*p));
  }
  return state;
}

void AdamStep(const std::vector<Mlp*>& params, const std::vector<Mlp>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw DataError("Adam: parameter, gradient and state block counts differ");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    p.array() -= state.learning_rate * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + state.epsilon);
  };
  for (std::size_t k = 0; k < params.size(); ++k) {
    Mlp& p = *params[k];
    CheckSameShape(p, grads[k]);
    CheckSameShape(p, state.first_moment[k]);
    for (int l = 0; l < p.num_layers(); ++l) {
      update(p.weights[l], grads[k].weights[l], state.first_moment[k].weights[l],
             state.second_moment[k].weights[l]);
      update(p.biases[l], grads[k].biases[l], state.first_moment[k].biases[l],
             state.second_moment[k].biases[l]);
    }
  }
}

std::vector<EpochRecord> Train(const std::vector<Mlp*>& params, AdamState& state,
                               std::size_t dataset_size, const BatchObjective& objective,
                               const TrainSchedule& schedule, Rng& rng,
                               const TrainHooks& hooks) {
  if (dataset_size == 0) throw DataError("cannot train on an empty dataset");
  if (schedule.batch_size <= 0 || schedule.epochs < 0) {
    throw ConfigError("training schedule needs positive batch size and non-negative epochs");
  }
  state.learning_rate = schedule.learning_rate;
  std::vector<Mlp> grads;
  for (const Mlp* p : params) grads.push_back(ZerosLike(*p));
  std::vector<std::size_t> order(dataset_size);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochRecord> trace;
  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    if (schedule.cosine_decay) {
      state.learning_rate = 0.5 * schedule.learning_rate *
                            (1.0 + std::cos(M_PI * epoch / static_cast<double>(schedule.epochs)));
    }
    if (hooks.on_epoch_begin) hooks.on_epoch_begin(epoch, rng);
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < dataset_size; begin += schedule.batch_size) {
      const std::size_t end = std::min(dataset_size, begin + schedule.batch_size);
      for (Mlp& g : grads) g.SetZero();
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      const double loss = objective(batch, grads);
      total += loss * static_cast<double>(batch.size());
      AdamStep(params, grads, state);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = total / static_cast<double>(dataset_size);
    record.holdout_loss =
        hooks.holdout_loss ? hooks.holdout_loss() : std::numeric_limits<double>::quiet_NaN();
    trace.push_back(record);
  }
  return trace;
}

nlohmann::json MlpToJson(const Mlp& mlp) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (int l = 0; l < mlp.num_layers(); ++l) {
    weights.push_back(MatrixToJson(mlp.weights[l]));
    biases.push_back(MatrixToJson(mlp.biases[l]));
  }
  return {{"dims", mlp.dims()}, {"weights", weights}, {"biases", biases}};
}

Mlp MlpFromJson(const nlohmann::json& j) {
  Mlp mlp;
  try {
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() < 2 || j.at("weights").size() != dims.size() - 1 ||
        j.at("biases").size() != dims.size() - 1) {
      throw DataError("checkpoint MLP layer list inconsistent with dims");
    }
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      mlp.weights.push_back(MatrixFromJson(j["weights"][l], dims[l + 1], dims[l]));
      mlp.biases.push_back(MatrixFromJson(j["biases"][l], dims[l + 1], 1));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed MLP checkpoint: ") + e.what());
  }
  if (!mlp.AllFinite()) throw DataError("checkpoint MLP has non-finite parameters");
  return mlp;
}

nlohmann::json AdamToJson(const AdamState& state) {
  nlohmann::json first = nlohmann::json::array();
  nlohmann::json second = nlohmann::json::array();
  for (const Mlp& m : state.first_moment) first.push_back(MlpToJson(m));
  for (const Mlp& v : state.second_moment) second.push_back(MlpToJson(v));
  return {{"learning_rate", state.learning_rate},
          {"beta1", state.beta1},
          {"beta2", state.beta2},
          {"epsilon", state.epsilon},
          {"step", state.step},
          {"first_moment", first},
          {"second_moment", second}};
}

AdamState AdamFromJson(const nlohmann::json& j) {
  AdamState state;
  try {
    state.learning_rate = j.at("learning_rate").get<double>();
    state.beta1 = j.at("beta1").get<double>();
    state.beta2 = j.at("beta2").get<double>();
    state.epsilon = j.at("epsilon").get<double>();
    state.step = j.at("step").get<std::int64_t>();
    for (const auto& m : j.at("first_moment")) state.first_moment.push_back(MlpFromJson(m));
    for (const auto& v : j.at("second_moment")) state.second_moment.push_back(MlpFromJson(v));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed optimizer state: ") + e.what());
  }
  return state;
}

}  // namespace inertia
