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

#include "inertia/arm.h"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "inertia/errors.h"

namespace inertia {
namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

void CheckDimension(const ArmModel& arm, const Eigen::VectorXd& q) {
  if (q.size() != arm.n_joints()) {
    std::ostringstream msg;
    msg << "joint vector has length " << q.size() << ", arm has "
        << arm.n_joints() << " joints";
    throw DataError(msg.str());
  }
}

Eigen::Vector3d Vec3FromJson(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string(what) + ": expected a 3-vector");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json Vec3ToJson(const Eigen::Vector3d& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

}  // namespace

double OrthonormalityDefect(const Eigen::Matrix3d& rotation) {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  const double off = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return off + std::abs(rotation.determinant() - 1.0);
}

void ValidateArm(const ArmModel& arm) {
  if (arm.n_joints() < 1) throw ConfigError("arm must have at least one joint");
  for (int j = 0; j < arm.n_joints(); ++j) {
    const JointSpec& joint = arm.joints[j];
    const std::string tag = "joint " + std::to_string(j + 1);
    if (std::abs(joint.axis.norm() - 1.0) > 1e-12) {
      throw ConfigError(tag + ": axis must have unit norm");
    }
    if (!(joint.link_mass >= 0.0)) throw ConfigError(tag + ": negative link mass");
    if (!(joint.lower < joint.upper)) {
      throw ConfigError(tag + ": joint limits require lower < upper");
    }
    if (OrthonormalityDefect(joint.offset.rotation) > 1e-9) {
      throw ConfigError(tag + ": offset rotation is not orthonormal");
    }
  }
  if (OrthonormalityDefect(arm.ee_offset.rotation) > 1e-9 ||
      OrthonormalityDefect(arm.tag_offset.rotation) > 1e-9) {
    throw ConfigError("end-effector/tag offset rotation is not orthonormal");
  }
  if (!arm.gravity.allFinite()) throw ConfigError("gravity must be finite");
  for (const CoupledLimit& limit : arm.coupled_limits) {
    if (limit.coeffs.size() != arm.n_joints()) {
      throw ConfigError("coupled limit coefficient count must equal joint count");
    }
    if (!(limit.lower <= limit.upper)) {
      throw ConfigError("coupled limit requires lower <= upper");
    }
  }
}

bool WithinJointLimits(const ArmModel& arm, const Eigen::VectorXd& q) {
  CheckDimension(arm, q);
  for (int j = 0; j < arm.n_joints(); ++j) {
    if (q[j] < arm.joints[j].lower || q[j] > arm.joints[j].upper) return false;
  }
  return true;
}

bool IsFeasible(const ArmModel& arm, const Eigen::VectorXd& q) {
  if (!WithinJointLimits(arm, q)) return false;
  for (const CoupledLimit& limit : arm.coupled_limits) {
    const double s = limit.coeffs.dot(q);
    if (s < limit.lower || s > limit.upper) return false;
  }
  return true;
}

std::vector<Pose> ForwardKinematics(const ArmModel& arm, const Eigen::VectorXd& q,
                                    LimitPolicy policy) {
  CheckDimension(arm, q);
  if (policy == LimitPolicy::kEnforce && !WithinJointLimits(arm, q)) {
    std::ostringstream msg;
    msg << "joint configuration outside limits: [" << q.transpose() << "]";
    throw DataError(msg.str());
  }
  std::vector<Pose> frames;
  frames.reserve(arm.n_joints() + 2);
  Pose current;
  for (int j = 0; j < arm.n_joints(); ++j) {
    const JointSpec& joint = arm.joints[j];
    const Pose rotation{Eigen::AngleAxisd(q[j], joint.axis).toRotationMatrix(),
                        Eigen::Vector3d::Zero()};
    current = current * joint.offset * rotation;
    frames.push_back(current);
  }
  frames.push_back(current * arm.ee_offset);
  frames.push_back(frames.back() * arm.tag_offset);
  return frames;
}

Eigen::MatrixXd Jacobian(const ArmModel& arm, const std::vector<Pose>& frames) {
  const int n = arm.n_joints();
  if (static_cast<int>(frames.size()) != n + 2) {
    throw DataError("frame list does not match arm");
  }
  const Eigen::Vector3d p_ee = frames[EndEffectorFrame(arm)].translation;
  Eigen::MatrixXd jac(6, n);
  for (int j = 0; j < n; ++j) {
    const Eigen::Vector3d z = frames[j].rotation * arm.joints[j].axis;
    jac.col(j).head<3>() = z.cross(p_ee - frames[j].translation);
    jac.col(j).tail<3>() = z;
  }
  return jac;
}

Eigen::MatrixXd Jacobian(const ArmModel& arm, const Eigen::VectorXd& q,
                         LimitPolicy policy) {
  return Jacobian(arm, ForwardKinematics(arm, q, policy));
}

Eigen::Matrix3d RotationFromRpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Pose PoseFromJson(const nlohmann::json& j) {
  Pose pose;
  if (j.contains("translation")) pose.translation = Vec3FromJson(j["translation"], "translation");
  if (j.contains("rpy_deg") && j.contains("rotation")) {
    throw ConfigError("pose must give either rpy_deg or rotation, not both");
  }
  if (j.contains("rpy_deg")) {
    const Eigen::Vector3d rpy = Vec3FromJson(j["rpy_deg"], "rpy_deg") * kDegToRad;
    pose.rotation = RotationFromRpy(rpy.x(), rpy.y(), rpy.z());
  } else if (j.contains("rotation")) {
    const auto& r = j["rotation"];
    if (!r.is_array() || r.size() != 9) throw ConfigError("rotation: expected 9 row-major entries");
    for (int i = 0; i < 9; ++i) pose.rotation(i / 3, i % 3) = r[i].get<double>();
  }
  return pose;
}

nlohmann::json PoseToJson(const Pose& pose) {
  nlohmann::json rotation = nlohmann::json::array();
  for (int i = 0; i < 9; ++i) rotation.push_back(pose.rotation(i / 3, i % 3));
  return {{"rotation", rotation}, {"translation", Vec3ToJson(pose.translation)}};
}

ArmModel ArmFromJson(const nlohmann::json& j) {
  ArmModel arm;
  try {
    if (j.contains("gravity")) arm.gravity = Vec3FromJson(j["gravity"], "gravity");
    for (const auto& jj : j.at("joints")) {
      JointSpec joint;
      joint.axis = Vec3FromJson(jj.at("axis"), "axis");
      // tolerate decimal round-off in hand-written files
      if (std::abs(joint.axis.norm() - 1.0) < 1e-6) joint.axis.normalize();
      if (jj.contains("offset")) joint.offset = PoseFromJson(jj["offset"]);
      joint.link_mass = jj.value("link_mass", 0.0);
      if (jj.contains("link_com")) joint.link_com = Vec3FromJson(jj["link_com"], "link_com");
      if (jj.contains("limits_deg")) {
        joint.lower = jj["limits_deg"].at(0).get<double>() * kDegToRad;
        joint.upper = jj["limits_deg"].at(1).get<double>() * kDegToRad;
      }
      arm.joints.push_back(joint);
    }
    if (j.contains("ee_offset")) arm.ee_offset = PoseFromJson(j["ee_offset"]);
    if (j.contains("tag_offset")) arm.tag_offset = PoseFromJson(j["tag_offset"]);
    if (j.contains("coupled_limits")) {
      for (const auto& jl : j["coupled_limits"]) {
        CoupledLimit limit;
        const auto coeffs = jl.at("coeffs").get<std::vector<double>>();
        limit.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
        limit.lower = jl.at("limits_deg").at(0).get<double>() * kDegToRad;
        limit.upper = jl.at("limits_deg").at(1).get<double>() * kDegToRad;
        arm.coupled_limits.push_back(limit);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("arm description: ") + e.what());
  }
  ValidateArm(arm);
  return arm;
}

nlohmann::json ArmToJson(const ArmModel& arm) {
  nlohmann::json joints = nlohmann::json::array();
  for (const JointSpec& joint : arm.joints) {
    joints.push_back({{"axis", Vec3ToJson(joint.axis)},
                      {"offset", PoseToJson(joint.offset)},
                      {"link_mass", joint.link_mass},
                      {"link_com", Vec3ToJson(joint.link_com)},
                      {"limits_deg", {joint.lower * kRadToDeg, joint.upper * kRadToDeg}}});
  }
  nlohmann::json limits = nlohmann::json::array();
  for (const CoupledLimit& limit : arm.coupled_limits) {
    limits.push_back({{"coeffs", std::vector<double>(limit.coeffs.begin(), limit.coeffs.end())},
                      {"limits_deg", {limit.lower * kRadToDeg, limit.upper * kRadToDeg}}});
  }
  return {{"gravity", Vec3ToJson(arm.gravity)},
          {"joints", joints},
          {"ee_offset", PoseToJson(arm.ee_offset)},
          {"tag_offset", PoseToJson(arm.tag_offset)},
          {"coupled_limits", limits}};
}

}  // namespace inertia
