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

#ifndef INERTIA_METRICS_H_
#define INERTIA_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "inertia/attention_model.h"
#include "inertia/identify.h"
#include "inertia/sim.h"
#include "inertia/torque_model.h"

namespace inertia {

struct ErrorMetrics {
  double mae = 0.0;
  double nmae_percent = 0.0;
  double nrmse_percent = 0.0;
  double scale = 1.0;
  std::size_t count = 0;
};

// From absolute errors |y_hat - y| (COM: Euclidean distances).
ErrorMetrics MetricsFromErrors(std::span<const double> abs_errors, double scale);
ErrorMetrics ComputeMetrics(std::span<const double> estimates, std::span<const double> truth,
                            double scale);
ErrorMetrics ComputeDistanceMetrics(std::span<const Eigen::Vector3d> estimates,
                                    std::span<const Eigen::Vector3d> truth, double scale);

double CuboidDiagonal(const Eigen::Vector3d& extents);

// Per-joint scales for torque metrics: max |tau_true| over `samples`.
Eigen::VectorXd MaxJointTorque(std::span<const SteadySample> samples);

enum class BaselineKind {
  kSensor,         // tau_raw - sgn(w) tau_f + b
  kPositionError,  // P (q_d - q) - sgn(w) tau_f + b
};

const char* BaselineName(BaselineKind kind);

struct BaselineParams {
  BaselineKind kind = BaselineKind::kPositionError;
  Eigen::VectorXd gain;      // P per joint (position-error baseline only)
  Eigen::VectorXd friction;  // tau_f per joint
  Eigen::VectorXd bias;      // b per joint
  double max_normal_residual = 0.0;  // |X^T (X beta - y)|_inf of the fit
};

// Per-joint ordinary least squares on the training labels. Throws DataError
// naming the regressor when the design is degenerate.
BaselineParams FitBaseline(BaselineKind kind, std::span<const SteadySample> samples);
Eigen::VectorXd PredictBaseline(const BaselineParams& params, const SteadySample& sample);
Eigen::MatrixXd PredictBaseline(const BaselineParams& params, std::span<const SteadySample> samples);

// Vertical force from sliding-window identification along a trajectory.
struct ForceTrack {
  std::vector<std::size_t> sample_index;  // window end index of each estimate
  std::vector<double> raw;                // m_hat |g|
  std::vector<double> filtered;           // trailing mean of raw
  std::vector<double> truth;              // m |g| of the sample at the window end
  std::size_t failed_windows = 0;         // singular windows (previous value held)
};

// `torque_estimates` is N x stream size; empty `weights` means identity.
ForceTrack SwitchingForceTrack(const ArmModel& arm, std::span<const SteadySample> stream,
                               const Eigen::MatrixXd& torque_estimates,
                               const Eigen::MatrixXd& weights, std::size_t window,
                               std::size_t filter_width, const WlsOptions& wls = {});
// `attention` may be null for identity weights.
ForceTrack SwitchingForceTrack(const ArmModel& arm, std::span<const SteadySample> stream,
                               const TorqueModel& torque, const AttentionModel* attention,
                               std::size_t window, std::size_t filter_width,
                               const WlsOptions& wls = {});

}  // namespace inertia

#endif  // INERTIA_METRICS_H_
