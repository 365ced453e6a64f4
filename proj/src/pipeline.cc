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

#include "inertia/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "inertia/dataset_io.h"
#include "inertia/errors.h"
#include "inertia/identify.h"
#include "inertia/rng.h"
#include "inertia/svg_plot.h"

namespace inertia {
namespace {

// Stream tags for the sub-seeds derived from the master seed.
constexpr std::uint64_t kTagTrainGrid = 0x7472677264ull;
constexpr std::uint64_t kTagTrainRandom = 0x7472726e64ull;
constexpr std::uint64_t kTagTest = 0x74657374ull;
constexpr std::uint64_t kTagTrajectory = 0x7472616aull;
constexpr std::uint64_t kTagTorque = 0x746f7271ull;
constexpr std::uint64_t kTagAttentionInit = 0x61696e74ull;
constexpr std::uint64_t kTagWindows = 0x77696e64ull;

std::uint64_t SubSeed(std::uint64_t seed, std::uint64_t tag) { return MixSeed(MixSeed(seed) ^ tag); }

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::ofstream OpenOut(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::string& path, const std::string& text) {
  auto out = OpenOut(path);
  out << text;
  if (!out) throw DataError("failed writing " + path);
}

void CsvPreamble(std::ostream& out, const std::string& config_hash) {
  out << "# config_hash=" << config_hash << '\n';
}

void RecordArtifact(const OutputLayout& out, const ExperimentConfig& config,
                    const std::string& name) {
  const std::string manifest_path = out.Path(kManifest);
  nlohmann::json manifest = nlohmann::json::object();
  if (std::filesystem::exists(manifest_path)) {
    try {
      manifest = nlohmann::json::parse(ReadText(manifest_path));
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  if (manifest.value("config_hash", config.hash) != config.hash) {
    manifest = nlohmann::json::object();  // stale manifest from another config
  }
  manifest["config_hash"] = config.hash;
  manifest["seed"] = config.seed;
  manifest["artifacts"][name] = Fnv1aHex(ReadText(out.Path(name)));
  WriteText(manifest_path, manifest.dump(2) + "\n");
}

Dataset LoadDataset(const OutputLayout& out, const char* name, const ExperimentConfig& config) {
  const std::string path = out.Path(name);
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(name) + " not found in " + out.dir + "; run gen-data first");
  }
  DatasetHeader header;
  Dataset data = ReadDatasetFile(path, &header);
  if (header.config_hash != config.hash) {
    throw ConfigError(path + " was generated from a different config (hash " +
                      header.config_hash + ", current " + config.hash + "); rerun gen-data");
  }
  if (header.n_joints != config.arm.n_joints()) {
    throw DataError(path + ": joint count does not match the arm");
  }
  return data;
}

TorqueModel LoadTorque(const OutputLayout& out, std::string* file_hash) {
  const std::string path = out.Path(kTorqueCheckpoint);
  if (!std::filesystem::exists(path)) {
    throw ConfigError("torque checkpoint " + path + " missing; run `train --model torque` first");
  }
  const std::string text = ReadText(path);
  if (file_hash) *file_hash = Fnv1aHex(text);
  try {
    return TorqueModelFromJson(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

AttentionModel LoadAttention(const OutputLayout& out, const std::string& torque_hash) {
  const std::string path = out.Path(kAttentionCheckpoint);
  if (!std::filesystem::exists(path)) {
    throw ConfigError("attention checkpoint " + path +
                      " missing; run `train --model attention` first");
  }
  AttentionModel model;
  try {
    model = AttentionModelFromJson(nlohmann::json::parse(ReadText(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  if (model.torque_model_hash != torque_hash) {
    throw ConfigError("attention checkpoint was trained against a different torque model; "
                      "retrain attention");
  }
  return model;
}

bool NeedsLearned(const std::vector<Method>& which, Method m) {
  for (Method w : which) {
    if (w == m) return true;
  }
  return false;
}

std::vector<Method> ParseMethodList(const std::string& list) {
  if (list == "all") return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseMethod(item));
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

const char* kPalette[] = {"#d62728", "#2ca02c", "#1f77b4", "#9467bd", "#ff7f0e"};

}  // namespace

// --- experiment API ------------------------------------------------------------

ExperimentData GenerateExperimentData(const ExperimentConfig& config, int workers) {
  ExperimentData data;
  data.train = GeneratePlanningGrid(config.arm, config.controller, config.training_objects,
                                    config.grid, {SubSeed(config.seed, kTagTrainGrid), workers});
  Dataset random = GenerateRandomSamples(config.arm, config.controller, config.training_objects,
                                         config.random_per_object,
                                         {SubSeed(config.seed, kTagTrainRandom), workers});
  data.train.rejected += random.rejected;
  data.train.samples.insert(data.train.samples.end(),
                            std::make_move_iterator(random.samples.begin()),
                            std::make_move_iterator(random.samples.end()));
  data.test = GenerateRandomSamples(config.arm, config.controller, config.testing_objects,
                                    config.test_per_object,
                                    {SubSeed(config.seed, kTagTest), workers});
  return data;
}

Dataset GenerateContinuousData(const ExperimentConfig& config, int workers) {
  if (config.continuous.trajectory.segments.empty()) {
    throw ConfigError("continuous experiment needs at least one trajectory segment");
  }
  return GenerateTrajectory(config.arm, config.controller, config.continuous.trajectory,
                            {SubSeed(config.seed, kTagTrajectory), workers});
}

const char* MethodName(Method method) {
  switch (method) {
    case Method::kSensor: return "sensor";
    case Method::kPositionError: return "pe";
    case Method::kTModel: return "t-model";
    case Method::kTAModel: return "t-a-model";
  }
  return "?";
}

Method ParseMethod(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == MethodName(m)) return m;
  }
  throw ConfigError("unknown method '" + name + "' (expected sensor, pe, t-model, t-a-model)");
}

MethodSet FitBaselines(std::span<const SteadySample> train) {
  MethodSet set;
  set.sensor = FitBaseline(BaselineKind::kSensor, train);
  set.pe = FitBaseline(BaselineKind::kPositionError, train);
  return set;
}

MethodInputs InputsFor(Method method, const MethodSet& methods,
                       std::span<const SteadySample> samples) {
  MethodInputs in;
  switch (method) {
    case Method::kSensor:
      in.torque = PredictBaseline(methods.sensor, samples);
      break;
    case Method::kPositionError:
      in.torque = PredictBaseline(methods.pe, samples);
      break;
    case Method::kTModel:
    case Method::kTAModel: {
      if (!methods.torque) throw ConfigError("torque model required for " + std::string(MethodName(method)));
      in.torque = EstimateTorques(*methods.torque, samples);
      if (method == Method::kTAModel) {
        if (!methods.attention) throw ConfigError("attention model required for t-a-model");
        std::vector<std::size_t> all(samples.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        in.weights = JointWeightsBatch(*methods.attention, samples, all);
      }
      break;
    }
  }
  return in;
}

double IdentificationReport::MeanMassNmae(Method method) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : summary) {
    if (s.method == method) { sum += s.mass.nmae_percent; ++n; }
  }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double IdentificationReport::MeanComNmae(Method method) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : summary) {
    if (s.method == method) { sum += s.com.nmae_percent; ++n; }
  }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

IdentificationReport RunIdentification(const ExperimentConfig& config,
                                       std::span<const SteadySample> test,
                                       const MethodSet& methods,
                                       const std::vector<Method>& which, std::size_t window,
                                       std::size_t repeats) {
  if (window == 0 || repeats == 0) throw ConfigError("window and repeats must be positive");
  const auto regressors = ComputeRegressors(config.arm, test);
  std::vector<MethodInputs> inputs;
  for (Method m : which) inputs.push_back(InputsFor(m, methods, test));
  const auto n = static_cast<Eigen::Index>(config.arm.n_joints());

  IdentificationReport report;
  for (std::size_t o = 0; o < config.testing_objects.size(); ++o) {
    const NamedObject& object = config.testing_objects[o];
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (test[i].object_id == object.name) pool.push_back(i);
    }
    if (pool.size() < window) {
      throw DataError("object " + object.name + " has " + std::to_string(pool.size()) +
                      " test samples, fewer than the window of " + std::to_string(window));
    }
    Rng rng = StreamRng(config.seed, kTagWindows, o);
    const auto windows = MakeInferenceWindows(pool, window, repeats, WindowMode::kRandom, rng);

    for (std::size_t k = 0; k < which.size(); ++k) {
      const MethodInputs& in = inputs[k];
      ObjectSummary summary;
      summary.object = object.name;
      summary.method = which[k];
      summary.true_mass = object.spec.mass;
      summary.true_com = object.spec.com_tag;
      std::vector<double> mass_err, com_err;
      for (std::size_t r = 0; r < windows.size(); ++r) {
        const auto& idx = windows[r];
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd tau(n, m);
        Eigen::VectorXd w;
        if (in.weights.size() > 0) w.resize(n * m);
        for (Eigen::Index c = 0; c < m; ++c) {
          tau.col(c) = in.torque.col(static_cast<Eigen::Index>(idx[c]));
          if (w.size() > 0) w.segment(c * n, n) = in.weights.col(static_cast<Eigen::Index>(idx[c]));
        }
        WindowEstimate est;
        est.object = object.name;
        est.method = which[k];
        est.repeat = r;
        try {
          const InertialEstimate x = SolveWls(StackSystem(regressors, idx, tau, w), config.wls);
          est.mass = x.mass;
          est.com_tag = x.com_tag;
          mass_err.push_back(std::abs(x.mass - object.spec.mass));
          summary.mean_mass += x.mass;
          if (x.com_tag) {
            com_err.push_back((*x.com_tag - object.spec.com_tag).norm());
            summary.mean_com += *x.com_tag;
          } else {
            ++summary.failed;
          }
        } catch (const RankDeficiencyError&) {
          est.failed = true;
          ++summary.failed;
        }
        report.estimates.push_back(est);
      }
      if (mass_err.empty()) {
        throw NumericalError("every identification window of " + object.name + " was singular");
      }
      summary.mean_mass /= static_cast<double>(mass_err.size());
      if (!com_err.empty()) summary.mean_com /= static_cast<double>(com_err.size());
      summary.mass = MetricsFromErrors(mass_err, object.spec.mass);
      if (com_err.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        summary.com = {nan, nan, nan, object.com_scale, 0};
        summary.mean_com.setConstant(nan);
      } else {
        summary.com = MetricsFromErrors(com_err, object.com_scale);
      }
      report.summary.push_back(summary);
    }
  }
  return report;
}

TorqueReport EvaluateTorques(const MethodSet& methods, std::span<const SteadySample> test) {
  if (test.empty()) throw DataError("empty test set");
  TorqueReport report;
  report.scale = MaxJointTorque(test);
  report.methods = {Method::kSensor, Method::kPositionError};
  if (methods.torque) report.methods.push_back(Method::kTModel);
  const auto n = report.scale.size();
  for (Method m : report.methods) {
    const Eigen::MatrixXd tau = InputsFor(m, methods, test).torque;
    std::vector<ErrorMetrics> per_joint;
    for (Eigen::Index j = 0; j < n; ++j) {
      std::vector<double> err(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        err[i] = std::abs(tau(j, static_cast<Eigen::Index>(i)) - test[i].tau_true(j));
      }
      per_joint.push_back(MetricsFromErrors(err, report.scale(j)));
    }
    report.joints.push_back(per_joint);
  }
  return report;
}

WeightReport EvaluateWeights(const AttentionModel& attention, std::span<const SteadySample> test,
                             const std::vector<NamedObject>& objects) {
  WeightReport report;
  const Eigen::Index n = attention.n_joints();
  report.mean_weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(objects.size()), n);
  report.overall = Eigen::VectorXd::Zero(n);
  std::size_t total = 0;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (test[i].object_id == objects[o].name) idx.push_back(i);
    }
    report.objects.push_back(objects[o].name);
    if (idx.empty()) continue;
    const Eigen::MatrixXd w = JointWeightsBatch(attention, test, idx);
    report.mean_weights.row(static_cast<Eigen::Index>(o)) = w.rowwise().mean().transpose();
    report.overall += w.rowwise().sum();
    total += idx.size();
  }
  if (total == 0) throw DataError("no test samples for the weight report");
  report.overall /= static_cast<double>(total);
  return report;
}

ContinuousResult RunContinuous(const ExperimentConfig& config,
                               std::span<const SteadySample> stream, const MethodSet& methods,
                               const std::vector<Method>& which) {
  if (stream.empty()) throw DataError("empty trajectory");
  ContinuousResult result;
  for (Method m : which) {
    const MethodInputs in = InputsFor(m, methods, stream);
    result.methods.push_back(m);
    result.tracks.push_back(SwitchingForceTrack(config.arm, stream, in.torque, in.weights,
                                                config.continuous.window,
                                                config.continuous.filter_width, config.wls));
  }
  return result;
}

std::vector<double> PlateauErrors(const ForceTrack& track, const TrajectorySpec& trajectory,
                                  std::size_t settle) {
  std::vector<double> worst;
  std::size_t start = 0;
  for (const auto& seg : trajectory.segments) {
    const std::size_t end = start + seg.samples;
    double err = -1.0;
    for (std::size_t k = 0; k < track.sample_index.size(); ++k) {
      const std::size_t i = track.sample_index[k];
      if (i < start + settle || i >= end) continue;
      err = std::max(err, std::abs(track.filtered[k] - track.truth[k]) / track.truth[k]);
    }
    worst.push_back(err < 0.0 ? std::numeric_limits<double>::infinity() : err);
    start = end;
  }
  return worst;
}

// --- writers ---------------------------------------------------------------------

void WriteLossTrace(const std::string& path, const std::vector<EpochRecord>& trace,
                    const std::string& config_hash) {
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "epoch,train_loss,holdout_loss\n";
  for (const auto& r : trace) {
    out << r.epoch << ',' << Num(r.train_loss) << ','
        << (std::isnan(r.holdout_loss) ? std::string() : Num(r.holdout_loss)) << '\n';
  }
}

void WriteEstimatesCsv(const std::string& path, const IdentificationReport& report,
                       const std::string& config_hash) {
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "object,method,repeat,status,mass,com_x,com_y,com_z\n";
  for (const auto& e : report.estimates) {
    out << e.object << ',' << MethodName(e.method) << ',' << e.repeat << ','
        << (e.failed ? "singular" : "ok") << ',';
    if (e.failed) {
      out << ",,,\n";
      continue;
    }
    out << Num(e.mass);
    if (e.com_tag) {
      out << ',' << Num(e.com_tag->x()) << ',' << Num(e.com_tag->y()) << ',' << Num(e.com_tag->z());
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void WriteInertiaTable(const std::string& path, const IdentificationReport& report,
                       const std::string& config_hash) {
  std::vector<Method> methods;
  std::vector<std::string> objects;
  for (const auto& s : report.summary) {
    if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
    if (std::find(objects.begin(), objects.end(), s.object) == objects.end()) objects.push_back(s.object);
  }
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "object,true_mass,true_com_x,true_com_y,true_com_z";
  for (Method m : methods) {
    const std::string p = MethodName(m);
    out << ',' << p << "_mass_mean," << p << "_mass_nmae_pct," << p << "_mass_nrmse_pct," << p
        << "_com_nmae_pct," << p << "_com_nrmse_pct," << p << "_failed";
  }
  out << '\n';
  for (const auto& obj : objects) {
    bool first = true;
    for (Method m : methods) {
      for (const auto& s : report.summary) {
        if (s.object != obj || s.method != m) continue;
        if (first) {
          out << obj << ',' << Num(s.true_mass) << ',' << Num(s.true_com.x()) << ','
              << Num(s.true_com.y()) << ',' << Num(s.true_com.z());
          first = false;
        }
        out << ',' << Num(s.mean_mass) << ',' << Num(s.mass.nmae_percent) << ','
            << Num(s.mass.nrmse_percent) << ',' << Num(s.com.nmae_percent) << ','
            << Num(s.com.nrmse_percent) << ',' << s.failed;
      }
    }
    out << '\n';
  }
  out << "average,,,,";
  for (Method m : methods) {
    out << ",," << Num(report.MeanMassNmae(m)) << ",," << Num(report.MeanComNmae(m)) << ",,";
  }
  out << '\n';
}

void WriteTorqueTable(const std::string& path, const TorqueReport& report,
                      const std::string& config_hash) {
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "joint,scale_nm";
  for (Method m : report.methods) {
    const std::string p = MethodName(m);
    out << ',' << p << "_mae_nm," << p << "_nmae_pct," << p << "_nrmse_pct";
  }
  out << '\n';
  const auto n = report.scale.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    out << j + 1 << ',' << Num(report.scale(j));
    for (const auto& per_joint : report.joints) {
      const auto& e = per_joint[j];
      out << ',' << Num(e.mae) << ',' << Num(e.nmae_percent) << ',' << Num(e.nrmse_percent);
    }
    out << '\n';
  }
  out << "average,";
  for (const auto& per_joint : report.joints) {
    double mae = 0, nmae = 0, nrmse = 0;
    for (const auto& e : per_joint) { mae += e.mae; nmae += e.nmae_percent; nrmse += e.nrmse_percent; }
    const double d = static_cast<double>(per_joint.size());
    out << ',' << Num(mae / d) << ',' << Num(nmae / d) << ',' << Num(nrmse / d);
  }
  out << '\n';
}

void WriteWeightTable(const std::string& path, const WeightReport& report,
                      const std::string& config_hash) {
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "object";
  for (Eigen::Index j = 0; j < report.overall.size(); ++j) out << ",w" << j + 1;
  out << '\n';
  for (std::size_t o = 0; o < report.objects.size(); ++o) {
    out << report.objects[o];
    for (Eigen::Index j = 0; j < report.overall.size(); ++j) {
      out << ',' << Num(report.mean_weights(static_cast<Eigen::Index>(o), j));
    }
    out << '\n';
  }
  out << "average";
  for (Eigen::Index j = 0; j < report.overall.size(); ++j) out << ',' << Num(report.overall(j));
  out << '\n';
}

void WriteContinuousCsv(const std::string& path, const ContinuousResult& result,
                        const std::string& config_hash) {
  auto out = OpenOut(path);
  CsvPreamble(out, config_hash);
  out << "sample,true_force_n";
  for (Method m : result.methods) out << ',' << MethodName(m) << "_raw," << MethodName(m) << "_filtered";
  out << '\n';
  if (result.tracks.empty()) return;
  const ForceTrack& ref = result.tracks.front();
  for (std::size_t k = 0; k < ref.sample_index.size(); ++k) {
    out << ref.sample_index[k] << ',' << Num(ref.truth[k]);
    for (const auto& t : result.tracks) out << ',' << Num(t.raw[k]) << ',' << Num(t.filtered[k]);
    out << '\n';
  }
}

// --- commands ----------------------------------------------------------------------

std::string OutputLayout::Path(const std::string& name) const {
  return (std::filesystem::path(dir) / name).string();
}

void CmdGenData(const ExperimentConfig& config, const OutputLayout& out, int workers,
                std::ostream& log) {
  const ExperimentData data = GenerateExperimentData(config, workers);
  const int n = config.arm.n_joints();
  WriteDatasetFile(out.Path(kTrainData),
                   {"train", config.hash, config.seed, n, data.train.samples.size(), data.train.rejected},
                   data.train);
  WriteDatasetFile(out.Path(kTestData),
                   {"test", config.hash, config.seed, n, data.test.samples.size(), data.test.rejected},
                   data.test);
  RecordArtifact(out, config, kTrainData);
  RecordArtifact(out, config, kTestData);
  log << "train: " << data.train.samples.size() << " samples (" << data.train.rejected
      << " rejected)\ntest: " << data.test.samples.size() << " samples (" << data.test.rejected
      << " rejected)\n";
}

void CmdTrain(const ExperimentConfig& config, const OutputLayout& out, const std::string& target,
              std::ostream& log) {
  if (target == "torque") {
    const Dataset train = LoadDataset(out, kTrainData, config);
    TorqueTrainingResult result = TrainTorqueModel(train.samples, config.torque_schedule,
                                                   SubSeed(config.seed, kTagTorque),
                                                   config.holdout_fraction);
    nlohmann::json j = TorqueModelToJson(result.model, &result.optimizer);
    j["config_hash"] = config.hash;
    j["seed"] = config.seed;
    WriteText(out.Path(kTorqueCheckpoint), j.dump() + "\n");
    WriteLossTrace(out.Path("torque_loss.csv"), result.trace, config.hash);
    RecordArtifact(out, config, kTorqueCheckpoint);
    RecordArtifact(out, config, "torque_loss.csv");
    log << "torque model: " << result.trace.size() << " epochs, final train loss "
        << Num(result.trace.empty() ? 0.0 : result.trace.back().train_loss) << '\n';
    return;
  }
  if (target == "attention") {
    std::string torque_hash;
    const TorqueModel torque = LoadTorque(out, &torque_hash);
    const Dataset train = LoadDataset(out, kTrainData, config);
    Rng rng = StreamRng(config.seed, kTagAttentionInit, 0);
    AttentionModel model = MakeAttentionModel(torque.norm, rng);
    AttentionTrainingResult result =
        TrainAttention(std::move(model), config.arm, torque, train.samples, config.attention);
    result.model.torque_model_hash = torque_hash;
    nlohmann::json j = AttentionModelToJson(result.model, &result.optimizer);
    j["config_hash"] = config.hash;
    j["seed"] = config.seed;
    WriteText(out.Path(kAttentionCheckpoint), j.dump() + "\n");
    WriteLossTrace(out.Path("attention_loss.csv"), result.trace, config.hash);
    RecordArtifact(out, config, kAttentionCheckpoint);
    RecordArtifact(out, config, "attention_loss.csv");
    log << "attention model: " << result.trace.size() << " epochs, " << result.skipped_windows
        << " singular windows skipped\n";
    return;
  }
  throw ConfigError("unknown training target '" + target + "' (expected torque or attention)");
}

namespace {

struct LoadedModels {
  MethodSet set;
  std::optional<TorqueModel> torque;
  std::optional<AttentionModel> attention;
};

void LoadModels(const ExperimentConfig& config, const OutputLayout& out,
                const std::vector<Method>& which, LoadedModels& m) {
  const Dataset train = LoadDataset(out, kTrainData, config);
  m.set = FitBaselines(train.samples);
  const bool need_t = NeedsLearned(which, Method::kTModel) || NeedsLearned(which, Method::kTAModel);
  if (!need_t) return;
  std::string torque_hash;
  m.torque = LoadTorque(out, &torque_hash);
  m.set.torque = &*m.torque;
  if (NeedsLearned(which, Method::kTAModel)) {
    m.attention = LoadAttention(out, torque_hash);
    m.set.attention = &*m.attention;
  }
}

}  // namespace

void CmdIdentify(const ExperimentConfig& config, const OutputLayout& out,
                 const std::vector<Method>& methods, std::size_t window, std::size_t repeats,
                 std::ostream& log) {
  LoadedModels models;
  LoadModels(config, out, methods, models);
  const Dataset test = LoadDataset(out, kTestData, config);
  const IdentificationReport report =
      RunIdentification(config, test.samples, models.set, methods, window, repeats);
  WriteEstimatesCsv(out.Path("identification_estimates.csv"), report, config.hash);
  WriteInertiaTable(out.Path("inertia_table.csv"), report, config.hash);
  RecordArtifact(out, config, "identification_estimates.csv");
  RecordArtifact(out, config, "inertia_table.csv");
  for (Method m : methods) {
    log << MethodName(m) << ": mass NMAE " << Num(report.MeanMassNmae(m)) << "%, COM NMAE "
        << Num(report.MeanComNmae(m)) << "%\n";
  }
}

void CmdEval(const ExperimentConfig& config, const OutputLayout& out, std::ostream& log) {
  LoadedModels models;
  LoadModels(config, out, {std::begin(kAllMethods), std::end(kAllMethods)}, models);
  const Dataset test = LoadDataset(out, kTestData, config);
  const TorqueReport torques = EvaluateTorques(models.set, test.samples);
  WriteTorqueTable(out.Path("torque_table.csv"), torques, config.hash);
  const WeightReport weights = EvaluateWeights(*models.attention, test.samples,
                                               config.testing_objects);
  WriteWeightTable(out.Path("weight_table.csv"), weights, config.hash);
  RecordArtifact(out, config, "torque_table.csv");
  RecordArtifact(out, config, "weight_table.csv");
  for (std::size_t k = 0; k < torques.methods.size(); ++k) {
    log << MethodName(torques.methods[k]) << " torque NMAE per joint:";
    for (const auto& e : torques.joints[k]) log << ' ' << Num(e.nmae_percent) << '%';
    log << '\n';
  }
  log << "mean attention weights:";
  for (Eigen::Index j = 0; j < weights.overall.size(); ++j) log << ' ' << Num(weights.overall(j));
  log << '\n';
}

void CmdContinuous(const ExperimentConfig& config, const OutputLayout& out, int workers,
                   std::ostream& log) {
  const std::vector<Method> which{std::begin(kAllMethods), std::end(kAllMethods)};
  LoadedModels models;
  LoadModels(config, out, which, models);
  const Dataset stream = GenerateContinuousData(config, workers);
  WriteDatasetFile(out.Path("trajectory.jsonl"),
                   {"trajectory", config.hash, config.seed, config.arm.n_joints(),
                    stream.samples.size(), stream.rejected},
                   stream);
  const ContinuousResult result = RunContinuous(config, stream.samples, models.set, which);
  WriteContinuousCsv(out.Path("continuous.csv"), result, config.hash);

  std::vector<PlotSeries> series;
  const ForceTrack& ref = result.tracks.front();
  std::vector<double> x(ref.sample_index.begin(), ref.sample_index.end());
  series.push_back({"ground truth", x, ref.truth, "#000000", true});
  for (std::size_t k = 0; k < result.tracks.size(); ++k) {
    series.push_back({MethodName(result.methods[k]), x, result.tracks[k].filtered,
                      kPalette[k % 5], false});
  }
  WriteText(out.Path("continuous.svg"),
            RenderLinePlot({"Vertical force estimation", "sample", "force (N)"}, series));
  RecordArtifact(out, config, "trajectory.jsonl");
  RecordArtifact(out, config, "continuous.csv");
  RecordArtifact(out, config, "continuous.svg");
  for (std::size_t k = 0; k < result.tracks.size(); ++k) {
    const auto errs = PlateauErrors(result.tracks[k], config.continuous.trajectory, 256);
    log << MethodName(result.methods[k]) << " plateau errors:";
    for (double e : errs) log << ' ' << Num(100.0 * e) << '%';
    log << '\n';
  }
}

ExitCode RunCommand(const std::string& command, const CommandOptions& options, std::ostream& log,
                    std::ostream& err) {
  try {
    ExperimentConfig config = LoadExperimentConfig(options.config_path);
    if (options.seed) config = WithSeed(config, *options.seed);
    if (options.workers < 1) throw ConfigError("--workers must be >= 1");
    OutputLayout out{options.out ? *options.out : config.output_dir};
    std::filesystem::create_directories(out.dir);
    if (command == "gen-data") {
      CmdGenData(config, out, options.workers, log);
    } else if (command == "train") {
      CmdTrain(config, out, options.train_target, log);
    } else if (command == "identify") {
      CmdIdentify(config, out, ParseMethodList(options.method),
                  options.window.value_or(config.window), options.repeats.value_or(config.repeats),
                  log);
    } else if (command == "eval") {
      CmdEval(config, out, log);
    } else if (command == "continuous") {
      CmdContinuous(config, out, options.workers, log);
    } else {
      throw ConfigError("unknown command " + command);
    }
    return ExitCode::kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::kConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return ExitCode::kData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return ExitCode::kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return ExitCode::kData;
  }
}

}  // namespace inertia
