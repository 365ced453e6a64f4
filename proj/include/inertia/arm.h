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

#ifndef INERTIA_ARM_H_
#define INERTIA_ARM_H_

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "json.hpp"

namespace inertia {

// Rigid transform: p_parent = rotation * p_child + translation.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose operator*(const Pose& child) const {
    return {rotation * child.rotation, rotation * child.translation + translation};
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

// Largest entry of R^T R - I, plus |det R - 1|.
double OrthonormalityDefect(const Eigen::Matrix3d& rotation);

// One revolute joint and the link it drives. The joint frame at angle q is
// parent * offset * Rot(axis, q); link COM is expressed in that frame.
struct JointSpec {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Pose offset;
  double link_mass = 0.0;
  Eigen::Vector3d link_com = Eigen::Vector3d::Zero();
  double lower = -M_PI;
  double upper = M_PI;
};

// lower <= sum_j coeffs[j] * q_j <= upper; used as the feasibility
// (self-collision) predicate on sampled configurations.
struct CoupledLimit {
  Eigen::VectorXd coeffs;
  double lower = 0.0;
  double upper = 0.0;
};

struct ArmModel {
  std::vector<JointSpec> joints;
  Pose ee_offset;
  Pose tag_offset;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  std::vector<CoupledLimit> coupled_limits;

  int n_joints() const { return static_cast<int>(joints.size()); }
};

// Throws ConfigError when an ArmModel invariant is violated.
void ValidateArm(const ArmModel& arm);

enum class LimitPolicy {
  kEnforce,
  // actual (sagged) configurations may sit slightly past commanded limits
  kIgnore,
};

bool WithinJointLimits(const ArmModel& arm, const Eigen::VectorXd& q);
bool IsFeasible(const ArmModel& arm, const Eigen::VectorXd& q);

// Frame indices into the ForwardKinematics result.
inline int EndEffectorFrame(const ArmModel& arm) { return arm.n_joints(); }
inline int TagFrame(const ArmModel& arm) { return arm.n_joints() + 1; }

// Base-frame poses of joint frames 0..N-1, then end-effector, then tag.
std::vector<Pose> ForwardKinematics(const ArmModel& arm, const Eigen::VectorXd& q,
                                    LimitPolicy policy = LimitPolicy::kEnforce);

// 6 x N geometric Jacobian at the end-effector point, base frame.
// Rows 0-2 linear, rows 3-5 angular.
Eigen::MatrixXd Jacobian(const ArmModel& arm, const Eigen::VectorXd& q,
                         LimitPolicy policy = LimitPolicy::kEnforce);
Eigen::MatrixXd Jacobian(const ArmModel& arm, const std::vector<Pose>& frames);

// JSON schema (angles in degrees):
//   {"gravity": [gx, gy, gz],
//    "joints": [{"axis": [..], "offset": {"translation": [..], "rpy_deg": [..]},
//                "link_mass": kg, "link_com": [..], "limits_deg": [lo, hi]}, ...],
//    "ee_offset": {...}, "tag_offset": {...},
//    "coupled_limits": [{"coeffs": [..], "limits_deg": [lo, hi]}, ...]}
ArmModel ArmFromJson(const nlohmann::json& j);
nlohmann::json ArmToJson(const ArmModel& arm);
Pose PoseFromJson(const nlohmann::json& j);
nlohmann::json PoseToJson(const Pose& pose);

// Roll-pitch-yaw (fixed X, then Y, then Z), radians.
Eigen::Matrix3d RotationFromRpy(double roll, double pitch, double yaw);

}  // namespace inertia

#endif  // INERTIA_ARM_H_
