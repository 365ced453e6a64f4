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

#ifndef INERTIA_STATICS_H_
#define INERTIA_STATICS_H_

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "inertia/arm.h"

namespace inertia {

// Force and moment in the base frame, moment taken about the end-effector
// point.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();

  // [f; n] stacked
  Eigen::Matrix<double, 6, 1> Stacked() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, moment;
    return w;
  }
};

// Carried object: mass (kg) and COM in the tag frame (m).
struct ObjectSpec {
  double mass = 0.0;
  Eigen::Vector3d com_tag = Eigen::Vector3d::Zero();
};

// Force and moment the object exerts on the end-effector:
// f = m g, n = (p_obj - p_ee) x f, with p_obj = R_tag * com_tag + p_tag.
Wrench ObjectWrench(const ArmModel& arm, const Eigen::VectorXd& q, const ObjectSpec& obj);
Wrench ObjectWrench(const ArmModel& arm, const std::vector<Pose>& frames, const ObjectSpec& obj);

// Static joint torques holding the arm still under its own link weights plus
// the given load (force/moment exerted *on* the end-effector). Computed by the
// outward-in force/moment balance of each link; joint limits are not enforced
// because actual configurations may sag past commanded ones.
Eigen::VectorXd StaticJointTorques(const ArmModel& arm, const Eigen::VectorXd& q,
                                   const Wrench& ee_load);
Eigen::VectorXd StaticJointTorques(const ArmModel& arm, const std::vector<Pose>& frames,
                                   const Wrench& ee_load);

// Torques due to the arm's own weight only.
Eigen::VectorXd FreeMotionTorques(const ArmModel& arm, const Eigen::VectorXd& q);

// Wrench applied to the environment by the end-effector, [-f; -n].
inline Eigen::Matrix<double, 6, 1> EnvironmentWrench(const Wrench& load) {
  return -load.Stacked();
}

}  // namespace inertia

#endif  // INERTIA_STATICS_H_
