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
#include <cmath>
#include <numeric>

#include "inertia/errors.h"

namespace inertia {
namespace {

constexpr std::uint64_t kInitTag = 0x746f7271;     // parameter init stream
constexpr std::uint64_t kShuffleTag = 0x73687566;  // batch order stream
constexpr std::uint64_t kSplitTag = 0x73706c74;    // holdout split stream

nlohmann::json VecToJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd VecFromJson(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

double ClampTo(double value, double lo, double hi, ClampCounter* counter) {
  if (value < lo || value > hi) {
    if (counter) ++counter->clamped;
    return std::clamp(value, lo, hi);
  }
  return value;
}

// Forward state of the full torque network for one batch.
struct TorqueForward {
  std::vector<MlpTape> rep_tapes;
  MlpTape estimator_tape;
  Eigen::MatrixXd scaled_output;  // N x B
};

TorqueForward Forward(const TorqueModel& model, std::span<const SteadySample> samples,
                      std::span<const std::size_t> batch, ClampCounter* counter) {
  const int n = model.n_joints();
  const int e = model.embedding_dim();
  TorqueForward f;
  f.rep_tapes.resize(n);
  Eigen::MatrixXd concat(n * e, static_cast<Eigen::Index>(batch.size()));
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd input = EncodeJointBatch(samples, batch, j, model.norm, counter);
    concat.middleRows(j * e, e) = MlpForwardBatch(model.rep[j], input, &f.rep_tapes[j]);
  }
  f.scaled_output = MlpForwardBatch(model.estimator, concat, &f.estimator_tape);
  return f;
}

}  // namespace

JointNormalization FitNormalization(std::span<const SteadySample> samples) {
  if (samples.empty()) throw DataError("cannot fit normalisation on an empty dataset");
  const int n = static_cast<int>(samples.front().q.size());
  JointNormalization norm;
  norm.q_min = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  norm.q_max = -norm.q_min;
  norm.error_scale = Eigen::VectorXd::Zero(n);
  norm.torque_scale = Eigen::VectorXd::Zero(n);
  for (const SteadySample& s : samples) {
    if (s.q.size() != n) throw DataError("samples disagree on joint count");
    norm.q_min = norm.q_min.cwiseMin(s.q);
    norm.q_max = norm.q_max.cwiseMax(s.q);
    norm.error_scale = norm.error_scale.cwiseMax(s.discrepancy().cwiseAbs());
    norm.torque_scale = norm.torque_scale.cwiseMax(s.tau_true.cwiseAbs());
  }
  for (int j = 0; j < n; ++j) {
    // degenerate joints keep a usable (unit-width) scale
    if (!(norm.q_max[j] > norm.q_min[j])) norm.q_max[j] = norm.q_min[j] + 1.0;
    if (!(norm.error_scale[j] > 0.0)) norm.error_scale[j] = 1.0;
    if (!(norm.torque_scale[j] > 0.0)) norm.torque_scale[j] = 1.0;
  }
  return norm;
}

nlohmann::json NormalizationToJson(const JointNormalization& norm) {
  return {{"q_min", VecToJson(norm.q_min)},
          {"q_max", VecToJson(norm.q_max)},
          {"error_scale", VecToJson(norm.error_scale)},
          {"torque_scale", VecToJson(norm.torque_scale)}};
}

JointNormalization NormalizationFromJson(const nlohmann::json& j) {
  JointNormalization norm;
  try {
    norm.q_min = VecFromJson(j.at("q_min"));
    norm.q_max = VecFromJson(j.at("q_max"));
    norm.error_scale = VecFromJson(j.at("error_scale"));
    norm.torque_scale = VecFromJson(j.at("torque_scale"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint lacks normalisation constants: ") + e.what());
  }
  const auto n = norm.q_min.size();
  if (n == 0 || norm.q_max.size() != n || norm.error_scale.size() != n ||
      norm.torque_scale.size() != n) {
    throw DataError("checkpoint normalisation constants are inconsistent");
  }
  return norm;
}

Eigen::Vector4d EncodeJointState(const SteadySample& s, int joint, const JointNormalization& norm,
                                 ClampCounter* counter) {
  if (joint < 0 || joint >= norm.n_joints() || s.q.size() != norm.n_joints()) {
    throw DataError("joint index or sample size does not match normalisation");
  }
  const double q01 = (s.q[joint] - norm.q_min[joint]) / (norm.q_max[joint] - norm.q_min[joint]);
  const double err = (s.q_d[joint] - s.q[joint]) / norm.error_scale[joint];
  const bool positive = s.rot_dir[joint] > 0.0;
  return {ClampTo(q01, 0.0, 1.0, counter), ClampTo(err, -1.0, 1.0, counter),
          positive ? 1.0 : 0.0, positive ? 0.0 : 1.0};
}

Eigen::MatrixXd EncodeJointBatch(std::span<const SteadySample> samples,
                                 std::span<const std::size_t> batch, int joint,
                                 const JointNormalization& norm, ClampCounter* counter) {
  Eigen::MatrixXd x(kJointStateDim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    x.col(b) = EncodeJointState(samples[batch[b]], joint, norm, counter);
  }
  return x;
}

std::vector<Mlp*> TorqueModel::Parameters() {
  std::vector<Mlp*> params;
  for (Mlp& r : rep) params.push_back(&r);
  params.push_back(&estimator);
  return params;
}

TorqueModel MakeTorqueModel(const JointNormalization& norm, Rng& rng,
                            const TorqueArchitecture& arch) {
  const int n = norm.n_joints();
  if (n < 1) throw ConfigError("torque model needs at least one joint");
  TorqueModel model;
  model.norm = norm;
  std::vector<int> rep_dims{kJointStateDim};
  rep_dims.insert(rep_dims.end(), arch.rep_hidden.begin(), arch.rep_hidden.end());
  rep_dims.push_back(arch.embedding);
  for (int j = 0; j < n; ++j) model.rep.push_back(MakeMlp(rep_dims, rng));
  std::vector<int> est_dims{n * arch.embedding};
  est_dims.insert(est_dims.end(), arch.estimator_hidden.begin(), arch.estimator_hidden.end());
  est_dims.push_back(n);
  model.estimator = MakeMlp(est_dims, rng, OutputInit::kZero);
  return model;
}

Eigen::MatrixXd EstimateTorques(const TorqueModel& model, std::span<const SteadySample> samples,
                                std::span<const std::size_t> batch, ClampCounter* counter) {
  TorqueForward f = Forward(model, samples, batch, counter);
  return model.norm.torque_scale.asDiagonal() * f.scaled_output;
}

Eigen::MatrixXd EstimateTorques(const TorqueModel& model, std::span<const SteadySample> samples) {
  std::vector<std::size_t> all(samples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return EstimateTorques(model, samples, all);
}

Eigen::VectorXd EstimateTorque(const TorqueModel& model, const SteadySample& sample) {
  const std::size_t index = 0;
  return EstimateTorques(model, std::span<const SteadySample>(&sample, 1),
                         std::span<const std::size_t>(&index, 1));
}

double TorqueBatchLoss(const TorqueModel& model, std::span<const SteadySample> samples,
                       std::span<const std::size_t> batch, std::vector<Mlp>* grads) {
  const int n = model.n_joints();
  const int e = model.embedding_dim();
  const auto b = static_cast<Eigen::Index>(batch.size());
  TorqueForward f = Forward(model, samples, batch, nullptr);
  Eigen::MatrixXd target(n, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    target.col(k) = samples[batch[k]].tau_true.cwiseQuotient(model.norm.torque_scale);
  }
  const Eigen::MatrixXd diff = f.scaled_output - target;
  const double count = static_cast<double>(n * b);
  const double loss = diff.squaredNorm() / count;
  if (grads) {
    const Eigen::MatrixXd upstream = (2.0 / count) * diff;
    const Eigen::MatrixXd d_concat =
        MlpBackwardBatch(model.estimator, f.estimator_tape, upstream, &(*grads)[n]);
    for (int j = 0; j < n; ++j) {
      MlpBackwardBatch(model.rep[j], f.rep_tapes[j], d_concat.middleRows(j * e, e), &(*grads)[j]);
    }
  }
  return loss;
}

TorqueTrainingResult TrainTorqueModel(std::span<const SteadySample> samples,
                                      const TrainSchedule& schedule, std::uint64_t seed,
                                      double holdout_fraction, const TorqueArchitecture& arch) {
  if (samples.empty()) throw DataError("cannot train the torque model on an empty dataset");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng = StreamRng(seed, kSplitTag, 0);
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_holdout = static_cast<std::size_t>(holdout_fraction * samples.size());
  std::vector<std::size_t> holdout(order.begin(), order.begin() + n_holdout);
  std::vector<std::size_t> train(order.begin() + n_holdout, order.end());
  if (train.empty()) throw DataError("holdout fraction leaves no training samples");
  std::sort(holdout.begin(), holdout.end());
  std::sort(train.begin(), train.end());

  std::vector<SteadySample> train_samples;
  train_samples.reserve(train.size());
  for (std::size_t i : train) train_samples.push_back(samples[i]);

  Rng init_rng = StreamRng(seed, kInitTag, 0);
  TorqueTrainingResult result{MakeTorqueModel(FitNormalization(train_samples), init_rng, arch),
                              {}, {}};
  std::vector<Mlp*> params = result.model.Parameters();
  result.optimizer = MakeAdamState(params, schedule.learning_rate);

  const std::span<const SteadySample> train_span(train_samples);
  BatchObjective objective = [&](std::span<const std::size_t> batch, std::vector<Mlp>& grads) {
    return TorqueBatchLoss(result.model, train_span, batch, &grads);
  };
  TrainHooks hooks;
  if (!holdout.empty()) {
    hooks.holdout_loss = [&] { return TorqueBatchLoss(result.model, samples, holdout, nullptr); };
  }
  Rng shuffle_rng = StreamRng(seed, kShuffleTag, 0);
  result.trace = Train(params, result.optimizer, train_samples.size(), objective, schedule,
                       shuffle_rng, hooks);
  return result;
}

nlohmann::json TorqueModelToJson(const TorqueModel& model, const AdamState* optimizer) {
  nlohmann::json rep = nlohmann::json::array();
  for (const Mlp& r : model.rep) rep.push_back(MlpToJson(r));
  nlohmann::json j = {{"kind", "torque_model"},
                      {"n_joints", model.n_joints()},
                      {"rep_modules", rep},
                      {"estimator", MlpToJson(model.estimator)},
                      {"normalization", NormalizationToJson(model.norm)}};
  if (optimizer) j["optimizer"] = AdamToJson(*optimizer);
  return j;
}

TorqueModel TorqueModelFromJson(const nlohmann::json& j) {
  TorqueModel model;
  try {
    if (j.at("kind") != "torque_model") throw DataError("checkpoint is not a torque model");
    if (!j.contains("normalization")) {
      throw DataError("torque checkpoint has no normalisation constants; refusing inference");
    }
    model.norm = NormalizationFromJson(j["normalization"]);
    for (const auto& r : j.at("rep_modules")) model.rep.push_back(MlpFromJson(r));
    model.estimator = MlpFromJson(j.at("estimator"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed torque checkpoint: ") + e.what());
  }
  const int n = model.n_joints();
  if (n != model.norm.n_joints() || n == 0 ||
      model.estimator.input_dim() != n * model.embedding_dim() ||
      model.estimator.output_dim() != n) {
    throw DataError("torque checkpoint dimensions are inconsistent");
  }
  for (const Mlp& r : model.rep) {
    if (r.input_dim() != kJointStateDim || r.output_dim() != model.embedding_dim()) {
      throw DataError("torque checkpoint representation modules are inconsistent");
    }
  }
  return model;
}

}  // namespace inertia
