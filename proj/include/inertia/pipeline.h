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

#ifndef INERTIA_PIPELINE_H_
#define INERTIA_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "inertia/attention_model.h"
#include "inertia/config.h"
#include "inertia/metrics.h"
#include "inertia/sim.h"
#include "inertia/torque_model.h"

namespace inertia {

enum class ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kNumerical = 4 };

// --- in-process experiment API ---------------------------------------------

struct ExperimentData {
  Dataset train;
  Dataset test;
};

ExperimentData GenerateExperimentData(const ExperimentConfig& config, int workers = 1);
Dataset GenerateContinuousData(const ExperimentConfig& config, int workers = 1);

enum class Method { kSensor, kPositionError, kTModel, kTAModel };
const char* MethodName(Method method);
Method ParseMethod(const std::string& name);
inline constexpr Method kAllMethods[] = {Method::kSensor, Method::kPositionError,
                                         Method::kTModel, Method::kTAModel};

// Estimators available for identification; the learned ones may be null when
// a method that needs them is not requested.
struct MethodSet {
  BaselineParams sensor;
  BaselineParams pe;
  const TorqueModel* torque = nullptr;
  const AttentionModel* attention = nullptr;
};

MethodSet FitBaselines(std::span<const SteadySample> train);

// N x M torque estimates and (for T-A) N x M joint weights; weights are
// empty for the unweighted methods.
struct MethodInputs {
  Eigen::MatrixXd torque;
  Eigen::MatrixXd weights;
};
MethodInputs InputsFor(Method method, const MethodSet& methods,
                       std::span<const SteadySample> samples);

struct WindowEstimate {
  std::string object;
  Method method = Method::kTModel;
  std::size_t repeat = 0;
  bool failed = false;
  double mass = 0.0;
  std::optional<Eigen::Vector3d> com_tag;
};

struct ObjectSummary {
  std::string object;
  Method method = Method::kTModel;
  double true_mass = 0.0;
  Eigen::Vector3d true_com = Eigen::Vector3d::Zero();
  ErrorMetrics mass;
  ErrorMetrics com;
  double mean_mass = 0.0;
  Eigen::Vector3d mean_com = Eigen::Vector3d::Zero();
  std::size_t failed = 0;
};

struct IdentificationReport {
  std::vector<WindowEstimate> estimates;
  std::vector<ObjectSummary> summary;  // object-major, method-minor
  // mean over objects of the per-object NMAE
  double MeanMassNmae(Method method) const;
  double MeanComNmae(Method method) const;
};

// Every method sees the same windows (drawn from each testing object's
// samples with a stream derived from the config seed).
IdentificationReport RunIdentification(const ExperimentConfig& config,
                                       std::span<const SteadySample> test,
                                       const MethodSet& methods,
                                       const std::vector<Method>& which, std::size_t window,
                                       std::size_t repeats);

struct TorqueReport {
  Eigen::VectorXd scale;                 // max |tau_true| per joint
  std::vector<Method> methods;           // sensor, pe, t-model
  std::vector<std::vector<ErrorMetrics>> joints;  // [method][joint]
};
TorqueReport EvaluateTorques(const MethodSet& methods, std::span<const SteadySample> test);

struct WeightReport {
  std::vector<std::string> objects;
  Eigen::MatrixXd mean_weights;  // objects x N
  Eigen::VectorXd overall;       // N
};
WeightReport EvaluateWeights(const AttentionModel& attention, std::span<const SteadySample> test,
                             const std::vector<NamedObject>& objects);

struct ContinuousResult {
  std::vector<Method> methods;
  std::vector<ForceTrack> tracks;
};
ContinuousResult RunContinuous(const ExperimentConfig& config,
                               std::span<const SteadySample> stream, const MethodSet& methods,
                               const std::vector<Method>& which);

// Worst relative error of the filtered track on each plateau, measured from
// `settle` samples after the plateau starts until it ends.
std::vector<double> PlateauErrors(const ForceTrack& track, const TrajectorySpec& trajectory,
                                  std::size_t settle);

// --- report writers ----------------------------------------------------------

void WriteLossTrace(const std::string& path, const std::vector<EpochRecord>& trace,
                    const std::string& config_hash);
void WriteEstimatesCsv(const std::string& path, const IdentificationReport& report,
                       const std::string& config_hash);
void WriteInertiaTable(const std::string& path, const IdentificationReport& report,
                       const std::string& config_hash);
void WriteTorqueTable(const std::string& path, const TorqueReport& report,
                      const std::string& config_hash);
void WriteWeightTable(const std::string& path, const WeightReport& report,
                      const std::string& config_hash);
void WriteContinuousCsv(const std::string& path, const ContinuousResult& result,
                        const std::string& config_hash);

// --- command-line commands ---------------------------------------------------

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string method = "all";
  std::optional<std::size_t> window;
  std::optional<std::size_t> repeats;
  std::optional<std::string> out;
  std::string train_target = "torque";  // torque | attention
};

// File names inside the output directory.
struct OutputLayout {
  std::string dir;
  std::string Path(const std::string& name) const;
};
inline constexpr const char* kTrainData = "train.jsonl";
inline constexpr const char* kTestData = "test.jsonl";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kTorqueCheckpoint = "torque_model.json";
inline constexpr const char* kAttentionCheckpoint = "attention_model.json";

void CmdGenData(const ExperimentConfig& config, const OutputLayout& out, int workers,
                std::ostream& log);
void CmdTrain(const ExperimentConfig& config, const OutputLayout& out, const std::string& target,
              std::ostream& log);
void CmdIdentify(const ExperimentConfig& config, const OutputLayout& out,
                 const std::vector<Method>& methods, std::size_t window, std::size_t repeats,
                 std::ostream& log);
void CmdEval(const ExperimentConfig& config, const OutputLayout& out, std::ostream& log);
void CmdContinuous(const ExperimentConfig& config, const OutputLayout& out, int workers,
                   std::ostream& log);

// Loads the config, dispatches, and maps exceptions to exit codes.
ExitCode RunCommand(const std::string& command, const CommandOptions& options, std::ostream& log,
                    std::ostream& err);

}  // namespace inertia

#endif  // INERTIA_PIPELINE_H_
