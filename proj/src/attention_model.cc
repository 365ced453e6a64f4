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

#include "inertia/attention_model.h"

#include <map>
#include <numeric>

#include "inertia/errors.h"

namespace inertia {
namespace {

constexpr std::uint64_t kInitTag = 0x6174746e;
constexpr std::uint64_t kWindowTag = 0x77696e64;
constexpr std::uint64_t kShuffleTag = 0x61736866;

struct AttentionForward {
  std::vector<MlpTape> rep_tapes;
  std::vector<MlpTape> scorer_tapes;
  Eigen::MatrixXd scores;   // N x B
  Eigen::MatrixXd weights;  // N x B
};

AttentionForward Forward(const AttentionModel& model, std::span<const SteadySample> samples,
                         std::span<const std::size_t> batch, bool keep_tapes) {
  const int n = model.n_joints();
  const int e = model.embedding_dim();
  const auto b = static_cast<Eigen::Index>(batch.size());
  AttentionForward f;
  if (keep_tapes) {
    f.rep_tapes.resize(n);
    f.scorer_tapes.resize(n);
  }
  f.scores.resize(n, b);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd input = EncodeJointBatch(samples, batch, j, model.norm);
    Eigen::MatrixXd scorer_in = Eigen::MatrixXd::Zero(e + n, b);
    scorer_in.topRows(e) =
        MlpForwardBatch(model.rep[j], input, keep_tapes ? &f.rep_tapes[j] : nullptr);
    scorer_in.row(e + j).setOnes();
    f.scores.row(j) =
        MlpForwardBatch(model.scorer, scorer_in, keep_tapes ? &f.scorer_tapes[j] : nullptr);
  }
  f.weights.resize(n, b);
  for (Eigen::Index k = 0; k < b; ++k) f.weights.col(k) = Softmax(f.scores.col(k));
  return f;
}

}  // namespace

std::vector<Mlp*> AttentionModel::Parameters() {
  std::vector<Mlp*> params;
  for (Mlp& r : rep) params.push_back(&r);
  params.push_back(&scorer);
  return params;
}

AttentionModel MakeAttentionModel(const JointNormalization& norm, Rng& rng,
                                  const AttentionArchitecture& arch) {
  const int n = norm.n_joints();
  if (n < 1) throw ConfigError("attention model needs at least one joint");
  AttentionModel model;
  model.norm = norm;
  std::vector<int> rep_dims{kJointStateDim};
  rep_dims.insert(rep_dims.end(), arch.rep_hidden.begin(), arch.rep_hidden.end());
  rep_dims.push_back(arch.embedding);
  for (int j = 0; j < n; ++j) model.rep.push_back(MakeMlp(rep_dims, rng));
  std::vector<int> scorer_dims{arch.embedding + n};
  scorer_dims.insert(scorer_dims.end(), arch.scorer_hidden.begin(), arch.scorer_hidden.end());
  scorer_dims.push_back(1);
  model.scorer = MakeMlp(scorer_dims, rng, OutputInit::kZero);
  return model;
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& scores) {
  const Eigen::ArrayXd e = (scores.array() - scores.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::MatrixXd JointScores(const AttentionModel& model, std::span<const SteadySample> samples,
                            std::span<const std::size_t> batch) {
  return Forward(model, samples, batch, false).scores;
}

Eigen::MatrixXd JointWeightsBatch(const AttentionModel& model,
                                  std::span<const SteadySample> samples,
                                  std::span<const std::size_t> batch) {
  return Forward(model, samples, batch, false).weights;
}

Eigen::VectorXd JointWeights(const AttentionModel& model, const SteadySample& sample) {
  const std::size_t index = 0;
  return JointWeightsBatch(model, std::span<const SteadySample>(&sample, 1),
                           std::span<const std::size_t>(&index, 1));
}

Eigen::VectorXd WeightMatrix(const AttentionModel& model, std::span<const SteadySample> samples,
                             std::span<const std::size_t> window) {
  if (window.empty()) throw DataError("weight matrix of an empty window");
  const Eigen::MatrixXd w = JointWeightsBatch(model, samples, window);
  return Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
}

Eigen::VectorXd WeightMatrix(const AttentionModel& model, std::span<const SteadySample> window) {
  std::vector<std::size_t> all(window.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return WeightMatrix(model, window, all);
}

AttentionTrainingSet MakeAttentionTrainingSet(const ArmModel& arm, const TorqueModel& torque,
                                              std::span<const SteadySample> samples) {
  AttentionTrainingSet set;
  set.samples = samples;
  set.regressors = ComputeRegressors(arm, samples);
  set.torque_estimates = EstimateTorques(torque, samples);
  return set;
}

WindowBatchResult AttentionWindowLoss(const AttentionModel& model, const AttentionTrainingSet& set,
                                      std::span<const std::vector<std::size_t>> windows,
                                      const AttentionLossWeights& loss_weights,
                                      const WlsOptions& wls, std::vector<Mlp>* grads) {
  const int n = model.n_joints();
  const int e = model.embedding_dim();
  std::vector<std::size_t> batch;
  for (const auto& w : windows) batch.insert(batch.end(), w.begin(), w.end());
  const bool need_grad = grads != nullptr;
  AttentionForward f = Forward(model, set.samples, batch, need_grad);

  // d loss / d weight, laid out like f.weights
  Eigen::MatrixXd d_weights = Eigen::MatrixXd::Zero(n, f.weights.cols());
  WindowBatchResult result;
  double total = 0.0;
  std::size_t solved = 0;
  std::vector<Eigen::VectorXd> window_grads(windows.size());
  std::vector<bool> ok(windows.size(), false);
  Eigen::Index offset = 0;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& window = windows[w];
    const auto m = static_cast<Eigen::Index>(window.size());
    Eigen::MatrixXd tau_hat(n, m);
    for (Eigen::Index i = 0; i < m; ++i) tau_hat.col(i) = set.torque_estimates.col(window[i]);
    const Eigen::MatrixXd wblock = f.weights.middleCols(offset, m);
    const Eigen::VectorXd wvec = Eigen::Map<const Eigen::VectorXd>(wblock.data(), wblock.size());
    const IdentSystem system = StackSystem(set.regressors, window, tau_hat, wvec);
    const ObjectSpec& truth = set.samples[window[0]].object;
    try {
      WlsOptions opts = wls;
      opts.known_mass = truth.mass;
      const InertialEstimate est = SolveWls(system, opts);
      const Eigen::Vector3d com_err = est.x.tail<3>() / truth.mass - truth.com_tag;
      const double mass_err = est.x[0] - truth.mass;
      total += loss_weights.mass * mass_err * mass_err + loss_weights.com * com_err.squaredNorm();
      ++solved;
      if (need_grad) {
        InertialVector dloss_dx;
        dloss_dx[0] = 2.0 * loss_weights.mass * mass_err;
        dloss_dx.tail<3>() = 2.0 * loss_weights.com * com_err / truth.mass;
        const Eigen::VectorXd g = WlsWeightGradient(system, est.x, dloss_dx);
        d_weights.middleCols(offset, m) = Eigen::Map<const Eigen::MatrixXd>(g.data(), n, m);
      }
    } catch (const RankDeficiencyError&) {
      ++result.skipped;
    }
    offset += m;
  }
  if (solved == 0) {
    result.loss = 0.0;
    return result;
  }
  result.loss = total / static_cast<double>(solved);
  if (!need_grad) return result;

  d_weights /= static_cast<double>(solved);
  // softmax backward per sample
  Eigen::MatrixXd d_scores(n, f.weights.cols());
  for (Eigen::Index k = 0; k < f.weights.cols(); ++k) {
    const Eigen::VectorXd wk = f.weights.col(k);
    const double inner = wk.dot(d_weights.col(k));
    d_scores.col(k) = wk.array() * (d_weights.col(k).array() - inner);
  }
  Mlp& scorer_grad = (*grads)[n];
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd d_in =
        MlpBackwardBatch(model.scorer, f.scorer_tapes[j], d_scores.row(j), &scorer_grad);
    MlpBackwardBatch(model.rep[j], f.rep_tapes[j], d_in.topRows(e), &(*grads)[j]);
  }
  return result;
}

AttentionTrainingResult TrainAttention(AttentionModel model, const ArmModel& arm,
                                       const TorqueModel& torque,
                                       std::span<const SteadySample> samples,
                                       const AttentionTrainingOptions& options) {
  if (model.n_joints() != torque.n_joints()) {
    throw ConfigError("attention and torque models disagree on joint count");
  }
  // single-object pools, objects too light for a COM target are left out
  std::map<std::string, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].object.mass >= options.wls.mass_floor) pools[samples[i].object_id].push_back(i);
  }
  std::vector<std::vector<std::size_t>> pool_list;
  for (auto& [name, pool] : pools) {
    if (pool.size() < options.window) {
      throw DataError("object " + name + " has fewer samples than the attention window");
    }
    pool_list.push_back(std::move(pool));
  }
  if (pool_list.empty()) throw DataError("no loaded-object samples for attention training");

  const AttentionTrainingSet set = MakeAttentionTrainingSet(arm, torque, samples);
  AttentionTrainingResult result{std::move(model), {}, {}, 0};
  std::vector<Mlp*> params = result.model.Parameters();
  result.optimizer = MakeAdamState(params, options.schedule.learning_rate);

  std::vector<std::vector<std::size_t>> windows;
  TrainHooks hooks;
  hooks.on_epoch_begin = [&](int epoch, Rng&) {
    windows.clear();
    for (std::size_t p = 0; p < pool_list.size(); ++p) {
      Rng rng = StreamRng(options.seed, kWindowTag, epoch * pool_list.size() + p);
      auto drawn = MakeInferenceWindows(pool_list[p], options.window, options.windows_per_object,
                                        WindowMode::kRandom, rng);
      windows.insert(windows.end(), drawn.begin(), drawn.end());
    }
  };
  BatchObjective objective = [&](std::span<const std::size_t> batch, std::vector<Mlp>& grads) {
    std::vector<std::vector<std::size_t>> chosen;
    chosen.reserve(batch.size());
    for (std::size_t k : batch) chosen.push_back(windows[k]);
    const WindowBatchResult r =
        AttentionWindowLoss(result.model, set, chosen, options.loss_weights, options.wls, &grads);
    result.skipped_windows += r.skipped;
    return r.loss;
  };
  const std::size_t per_epoch = pool_list.size() * options.windows_per_object;
  Rng shuffle_rng = StreamRng(options.seed, kShuffleTag, 0);
  result.trace = Train(params, result.optimizer, per_epoch, objective, options.schedule,
                       shuffle_rng, hooks);
  return result;
}

nlohmann::json AttentionModelToJson(const AttentionModel& model, const AdamState* optimizer) {
  nlohmann::json rep = nlohmann::json::array();
  for (const Mlp& r : model.rep) rep.push_back(MlpToJson(r));
  nlohmann::json j = {{"kind", "attention_model"},
                      {"n_joints", model.n_joints()},
                      {"rep_modules", rep},
                      {"scorer", MlpToJson(model.scorer)},
                      {"normalization", NormalizationToJson(model.norm)},
                      {"torque_model_hash", model.torque_model_hash}};
  if (optimizer) j["optimizer"] = AdamToJson(*optimizer);
  return j;
}

AttentionModel AttentionModelFromJson(const nlohmann::json& j) {
  AttentionModel model;
  try {
    if (j.at("kind") != "attention_model") throw DataError("checkpoint is not an attention model");
    if (!j.contains("normalization")) {
      throw DataError("attention checkpoint has no normalisation constants; refusing inference");
    }
    model.norm = NormalizationFromJson(j["normalization"]);
    for (const auto& r : j.at("rep_modules")) model.rep.push_back(MlpFromJson(r));
    model.scorer = MlpFromJson(j.at("scorer"));
    model.torque_model_hash = j.at("torque_model_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed attention checkpoint: ") + e.what());
  }
  const int n = model.n_joints();
  if (n == 0 || n != model.norm.n_joints() ||
      model.scorer.input_dim() != model.embedding_dim() + n || model.scorer.output_dim() != 1) {
    throw DataError("attention checkpoint dimensions are inconsistent");
  }
  return model;
}

}  // namespace inertia
