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

#include "inertia/identify.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace inertia {
namespace {

void CheckSystem(const IdentSystem& s) {
  if (s.a.cols() != 4) throw DataError("identification matrix must have 4 columns");
  if (s.residual.size() != s.a.rows() || s.weights.size() != s.a.rows()) {
    throw DataError("identification system rows are inconsistent");
  }
  if (s.a.rows() < 4) throw DataError("identification needs at least 4 rows");
  if (!(s.weights.array() > 0.0).all()) throw DataError("WLS weights must be strictly positive");
  if (!s.a.allFinite() || !s.residual.allFinite() || !s.weights.allFinite()) {
    throw DataError("identification system has non-finite entries");
  }
}

}  // namespace

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Matrix64 BuildB(const Eigen::Vector3d& gravity, const Pose& tag_pose,
                const Eigen::Vector3d& ee_position) {
  const Eigen::Matrix3d skew_t = Skew(gravity).transpose();
  Matrix64 b = Matrix64::Zero();
  b.block<3, 1>(0, 0) = -gravity;
  b.block<3, 1>(3, 0) = -skew_t * (tag_pose.translation - ee_position);
  b.block<3, 3>(3, 1) = -skew_t * tag_pose.rotation;
  return b;
}

Eigen::MatrixXd BuildA(const Eigen::MatrixXd& jacobian, const Matrix64& b) {
  if (jacobian.rows() != 6) throw DataError("Jacobian must have 6 rows");
  return jacobian.transpose() * b;
}

SampleRegressor ComputeRegressor(const ArmModel& arm, const SteadySample& sample) {
  const auto frames = ForwardKinematics(arm, sample.q, LimitPolicy::kIgnore);
  const Eigen::MatrixXd jac = Jacobian(arm, frames);
  const Matrix64 b =
      BuildB(arm.gravity, sample.tag_pose, frames[EndEffectorFrame(arm)].translation);
  return {BuildA(jac, b), sample.tau_g};
}

std::vector<SampleRegressor> ComputeRegressors(const ArmModel& arm,
                                               std::span<const SteadySample> samples) {
  std::vector<SampleRegressor> out;
  out.reserve(samples.size());
  for (const SteadySample& s : samples) out.push_back(ComputeRegressor(arm, s));
  return out;
}

IdentSystem StackSystem(std::span<const SampleRegressor> regressors,
                        std::span<const std::size_t> window,
                        const Eigen::MatrixXd& torque_estimates, const Eigen::VectorXd& weights) {
  if (window.empty()) throw DataError("identification window is empty");
  const auto n = regressors[window[0]].a.rows();
  const auto m = static_cast<Eigen::Index>(window.size());
  if (torque_estimates.rows() != n || torque_estimates.cols() != m) {
    throw DataError("torque estimates must be N x M for the window");
  }
  if (weights.size() != 0 && weights.size() != n * m) {
    throw DataError("weight vector length must be M * N");
  }
  IdentSystem s;
  s.a.resize(n * m, 4);
  s.residual.resize(n * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const SampleRegressor& r = regressors[window[i]];
    if (r.a.rows() != n) throw DataError("samples in a window disagree on joint count");
    s.a.middleRows(i * n, n) = r.a;
    s.residual.segment(i * n, n) = torque_estimates.col(i) - r.tau_g;
  }
  s.weights = weights.size() ? weights : Eigen::VectorXd::Ones(n * m);
  return s;
}

IdentSystem StackSystem(const ArmModel& arm, std::span<const SteadySample> samples,
                        const Eigen::MatrixXd& torque_estimates, const Eigen::VectorXd& weights) {
  const auto regressors = ComputeRegressors(arm, samples);
  std::vector<std::size_t> window(samples.size());
  std::iota(window.begin(), window.end(), std::size_t{0});
  return StackSystem(regressors, window, torque_estimates, weights);
}

InertialEstimate SolveWls(const IdentSystem& system, const WlsOptions& options) {
  CheckSystem(system);
  const Eigen::VectorXd sqrt_w = system.weights.cwiseSqrt();
  const Eigen::MatrixXd scaled_a = sqrt_w.asDiagonal() * system.a;
  const Eigen::VectorXd scaled_r = sqrt_w.cwiseProduct(system.residual);

  // cond(A^T W A) = cond(sqrt(W) A)^2
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled_a, Eigen::ComputeFullV);
  const Eigen::Vector4d sv = svd.singularValues();
  const double cond = sv[3] > 0.0 ? (sv[0] / sv[3]) * (sv[0] / sv[3])
                                  : std::numeric_limits<double>::infinity();
  if (!(cond <= options.condition_cap)) {
    const InertialVector direction = svd.matrixV().col(3);
    std::ostringstream msg;
    msg.precision(4);
    msg << "rank-deficient identification system (cond(A^T W A) = " << cond
        << "); unobservable direction in [m, m*px, m*py, m*pz]: [" << direction.transpose()
        << "]";
    throw RankDeficiencyError(msg.str(), direction, cond);
  }

  InertialEstimate est;
  est.x = scaled_a.householderQr().solve(scaled_r);
  est.condition_number = std::max(1.0, cond);
  est.residual_cost = (scaled_a * est.x - scaled_r).squaredNorm();
  est.mass = est.x[0];
  const double divisor = options.known_mass.value_or(est.mass);
  if (std::abs(divisor) >= options.mass_floor) {
    est.com_tag = est.x.tail<3>() / divisor;
  }
  return est;
}

Eigen::VectorXd WlsWeightGradient(const IdentSystem& system, const InertialVector& x_hat,
                                  const InertialVector& dloss_dx) {
  CheckSystem(system);
  const Eigen::Matrix4d normal =
      system.a.transpose() * system.weights.asDiagonal() * system.a;
  const Eigen::Vector4d u = normal.ldlt().solve(dloss_dx);
  const Eigen::VectorXd lever = system.a * u;
  const Eigen::VectorXd err = system.residual - system.a * x_hat;
  return lever.cwiseProduct(err);
}

}  // namespace inertia
