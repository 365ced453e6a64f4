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

#ifndef INERTIA_IDENTIFY_H_
#define INERTIA_IDENTIFY_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "inertia/arm.h"
#include "inertia/errors.h"
#include "inertia/sim.h"

namespace inertia {

using Matrix64 = Eigen::Matrix<double, 6, 4>;

// Unknowns are x = [m, m * com_tag].
using InertialVector = Eigen::Vector4d;

Eigen::Matrix3d Skew(const Eigen::Vector3d& v);

// Maps x to the wrench the end-effector applies to the environment.
Matrix64 BuildB(const Eigen::Vector3d& gravity, const Pose& tag_pose,
                const Eigen::Vector3d& ee_position);

// A = J^T B (N x 4).
Eigen::MatrixXd BuildA(const Eigen::MatrixXd& jacobian, const Matrix64& b);

// Per-sample regressor rows A_i and free-motion torque, computed from the
// measured joint angles and the observed tag pose.
struct SampleRegressor {
  Eigen::MatrixXd a;      // N x 4
  Eigen::VectorXd tau_g;  // N
};
SampleRegressor ComputeRegressor(const ArmModel& arm, const SteadySample& sample);
std::vector<SampleRegressor> ComputeRegressors(const ArmModel& arm,
                                               std::span<const SteadySample> samples);

// Stacked weighted least-squares system, rows sample-major then joint.
struct IdentSystem {
  Eigen::MatrixXd a;         // (M N) x 4
  Eigen::VectorXd residual;  // tau_hat - tau_g
  Eigen::VectorXd weights;   // diagonal of W, strictly positive
};

// `torque_estimates` is N x M (column i for sample window[i]); empty
// `weights` means identity weighting.
IdentSystem StackSystem(std::span<const SampleRegressor> regressors,
                        std::span<const std::size_t> window,
                        const Eigen::MatrixXd& torque_estimates,
                        const Eigen::VectorXd& weights = {});
IdentSystem StackSystem(const ArmModel& arm, std::span<const SteadySample> samples,
                        const Eigen::MatrixXd& torque_estimates,
                        const Eigen::VectorXd& weights = {});

struct WlsOptions {
  double condition_cap = 1e10;  // on A^T W A
  double mass_floor = 1e-4;     // kg; below this the COM is undefined
  // training mode: divide m * com by this mass instead of the estimate
  std::optional<double> known_mass;
};

struct InertialEstimate {
  InertialVector x = InertialVector::Zero();
  double mass = 0.0;
  std::optional<Eigen::Vector3d> com_tag;  // empty when mass < mass floor
  double condition_number = 1.0;
  double residual_cost = 0.0;
};

// Thrown when A^T W A is singular or exceeds the condition cap.
class RankDeficiencyError : public NumericalError {
 public:
  RankDeficiencyError(const std::string& what, const InertialVector& direction,
                      double condition_number)
      : NumericalError(what), direction_(direction), condition_number_(condition_number) {}
  // unit vector in [m, m px, m py, m pz] space that the data cannot resolve
  const InertialVector& direction() const { return direction_; }
  double condition_number() const { return condition_number_; }

 private:
  InertialVector direction_;
  double condition_number_;
};

// Minimises (A x - r)^T W (A x - r) by Householder QR on sqrt(W)-scaled rows.
InertialEstimate SolveWls(const IdentSystem& system, const WlsOptions& options = {});

// d L / d w_k for a loss L(x_hat) with gradient `dloss_dx` at the WLS optimum:
//   d x_hat / d w_k = (A^T W A)^{-1} a_k (r_k - a_k^T x_hat).
Eigen::VectorXd WlsWeightGradient(const IdentSystem& system, const InertialVector& x_hat,
                                  const InertialVector& dloss_dx);

}  // namespace inertia

#endif  // INERTIA_IDENTIFY_H_
