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

#include "inertia/metrics.h"

#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "inertia/errors.h"

namespace inertia {

ErrorMetrics MetricsFromErrors(std::span<const double> abs_errors, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DataError("metric scale must be positive");
  if (abs_errors.empty()) throw DataError("no errors to summarise");
  double sum = 0.0, sum_sq = 0.0;
  for (double e : abs_errors) {
    sum += std::abs(e);
    sum_sq += e * e;
  }
  const double n = static_cast<double>(abs_errors.size());
  ErrorMetrics m;
  m.count = abs_errors.size();
  m.scale = scale;
  m.mae = sum / n;
  m.nmae_percent = 100.0 * m.mae / scale;
  m.nrmse_percent = 100.0 * std::sqrt(sum_sq / n) / scale;
  return m;
}

ErrorMetrics ComputeMetrics(std::span<const double> estimates, std::span<const double> truth,
                            double scale) {
  if (estimates.size() != truth.size()) throw DataError("estimate/truth length mismatch");
  std::vector<double> errors(estimates.size());
  for (std::size_t k = 0; k < errors.size(); ++k) errors[k] = std::abs(estimates[k] - truth[k]);
  return MetricsFromErrors(errors, scale);
}

ErrorMetrics ComputeDistanceMetrics(std::span<const Eigen::Vector3d> estimates,
                                    std::span<const Eigen::Vector3d> truth, double scale) {
  if (estimates.size() != truth.size()) throw DataError("estimate/truth length mismatch");
  std::vector<double> errors(estimates.size());
  for (std::size_t k = 0; k < errors.size(); ++k) errors[k] = (estimates[k] - truth[k]).norm();
  return MetricsFromErrors(errors, scale);
}

double CuboidDiagonal(const Eigen::Vector3d& extents) { return extents.norm(); }

Eigen::VectorXd MaxJointTorque(std::span<const SteadySample> samples) {
  if (samples.empty()) throw DataError("no samples for torque scale");
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(samples.front().tau_true.size());
  for (const SteadySample& s : samples) scale = scale.cwiseMax(s.tau_true.cwiseAbs());
  return scale;
}

const char* BaselineName(BaselineKind kind) {
  return kind == BaselineKind::kSensor ? "sensor" : "pe";
}

BaselineParams FitBaseline(BaselineKind kind, std::span<const SteadySample> samples) {
  if (samples.empty()) throw DataError("cannot fit a baseline on an empty dataset");
  const int n = static_cast<int>(samples.front().q.size());
  const auto rows = static_cast<Eigen::Index>(samples.size());
  const bool pe = kind == BaselineKind::kPositionError;
  const int cols = pe ? 3 : 2;
  const std::vector<std::string> names =
      pe ? std::vector<std::string>{"position error (q_d - q)", "rotation direction sgn(w)",
                                    "constant bias"}
         : std::vector<std::string>{"rotation direction sgn(w)", "constant bias"};
  BaselineParams params;
  params.kind = kind;
  params.gain = Eigen::VectorXd::Zero(n);
  params.friction = Eigen::VectorXd::Zero(n);
  params.bias = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const SteadySample& s = samples[r];
      if (pe) {
        x(r, 0) = s.q_d[j] - s.q[j];
        x(r, 1) = -s.rot_dir[j];
        x(r, 2) = 1.0;
        y[r] = s.tau_true[j];
      } else {
        x(r, 0) = -s.rot_dir[j];
        x(r, 1) = 1.0;
        y[r] = s.tau_true[j] - s.tau_sensor_raw[j];
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < cols) {
      // the last pivoted column is the one that adds nothing
      const int missing = static_cast<int>(qr.colsPermutation().indices()[cols - 1]);
      throw DataError(std::string(BaselineName(kind)) + " baseline: degenerate design for joint " +
                      std::to_string(j + 1) + ", regressor '" + names[missing] +
                      "' is not identifiable from the data");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    params.max_normal_residual = std::max(
        params.max_normal_residual, (x.transpose() * (x * beta - y)).cwiseAbs().maxCoeff());
    if (pe) {
      params.gain[j] = beta[0];
      params.friction[j] = beta[1];
      params.bias[j] = beta[2];
    } else {
      params.friction[j] = beta[0];
      params.bias[j] = beta[1];
    }
  }
  return params;
}

Eigen::VectorXd PredictBaseline(const BaselineParams& p, const SteadySample& s) {
  const Eigen::VectorXd friction = s.rot_dir.cwiseProduct(p.friction);
  if (p.kind == BaselineKind::kSensor) return s.tau_sensor_raw - friction + p.bias;
  return p.gain.cwiseProduct(s.discrepancy()) - friction + p.bias;
}

Eigen::MatrixXd PredictBaseline(const BaselineParams& p, std::span<const SteadySample> samples) {
  Eigen::MatrixXd out(p.bias.size(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) out.col(i) = PredictBaseline(p, samples[i]);
  return out;
}

ForceTrack SwitchingForceTrack(const ArmModel& arm, std::span<const SteadySample> stream,
                               const Eigen::MatrixXd& torque_estimates,
                               const Eigen::MatrixXd& weights, std::size_t window,
                               std::size_t filter_width, const WlsOptions& wls) {
  if (window == 0 || filter_width == 0) throw ConfigError("window and filter width must be positive");
  if (stream.size() < window) {
    throw DataError("trajectory of " + std::to_string(stream.size()) +
                    " samples is shorter than one identification window");
  }
  const auto count = static_cast<Eigen::Index>(stream.size());
  const Eigen::Index n = torque_estimates.rows();
  if (torque_estimates.cols() != count || (weights.size() > 0 && (weights.rows() != n ||
                                                                  weights.cols() != count))) {
    throw DataError("torque estimates / weights do not match the trajectory length");
  }
  const double g = arm.gravity.norm();
  const auto regressors = ComputeRegressors(arm, stream);
  std::vector<std::size_t> all(stream.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  ForceTrack track;
  double last = 0.0;
  for (std::size_t end = window - 1; end < stream.size(); ++end) {
    const std::size_t begin = end + 1 - window;
    const std::span<const std::size_t> idx(all.data() + begin, window);
    const auto m = static_cast<Eigen::Index>(window);
    Eigen::VectorXd wvec;
    if (weights.size() > 0) {
      const Eigen::MatrixXd wblock = weights.middleCols(begin, m);
      wvec = Eigen::Map<const Eigen::VectorXd>(wblock.data(), n * m);
    }
    const IdentSystem system =
        StackSystem(regressors, idx, torque_estimates.middleCols(begin, m), wvec);
    double force = last;
    try {
      force = SolveWls(system, wls).mass * g;
    } catch (const RankDeficiencyError&) {
      ++track.failed_windows;
    }
    last = force;
    track.sample_index.push_back(end);
    track.raw.push_back(force);
    track.truth.push_back(stream[end].object.mass * g);
  }
  // trailing (causal) mean; shorter at the start of the track
  for (std::size_t k = 0; k < track.raw.size(); ++k) {
    const std::size_t first = k + 1 >= filter_width ? k + 1 - filter_width : 0;
    double sum = 0.0;
    for (std::size_t i = first; i <= k; ++i) sum += track.raw[i];
    track.filtered.push_back(sum / static_cast<double>(k + 1 - first));
  }
  return track;
}

ForceTrack SwitchingForceTrack(const ArmModel& arm, std::span<const SteadySample> stream,
                               const TorqueModel& torque, const AttentionModel* attention,
                               std::size_t window, std::size_t filter_width,
                               const WlsOptions& wls) {
  const Eigen::MatrixXd tau_hat = EstimateTorques(torque, stream);
  Eigen::MatrixXd weights;
  if (attention) {
    std::vector<std::size_t> all(stream.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    weights = JointWeightsBatch(*attention, stream, all);
  }
  return SwitchingForceTrack(arm, stream, tau_hat, weights, window, filter_width, wls);
}

}  // namespace inertia
