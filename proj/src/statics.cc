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

#include "inertia/statics.h"

namespace inertia {

Wrench ObjectWrench(const ArmModel& arm, const std::vector<Pose>& frames, const ObjectSpec& obj) {
  const Pose& ee = frames[EndEffectorFrame(arm)];
  const Pose& tag = frames[TagFrame(arm)];
  Wrench w;
  w.force = obj.mass * arm.gravity;
  const Eigen::Vector3d p_obj = tag * obj.com_tag;
  w.moment = (p_obj - ee.translation).cross(w.force);
  return w;
}

Wrench ObjectWrench(const ArmModel& arm, const Eigen::VectorXd& q, const ObjectSpec& obj) {
  return ObjectWrench(arm, ForwardKinematics(arm, q, LimitPolicy::kIgnore), obj);
}

Eigen::VectorXd StaticJointTorques(const ArmModel& arm, const std::vector<Pose>& frames,
                                   const Wrench& ee_load) {
  const int n = arm.n_joints();
  // force/moment exerted by link j-1 on link j, moment about joint j origin
  Eigen::Vector3d force = -ee_load.force;
  Eigen::Vector3d moment = -ee_load.moment;
  Eigen::Vector3d distal_point = frames[EndEffectorFrame(arm)].translation;
  Eigen::VectorXd tau(n);
  for (int j = n - 1; j >= 0; --j) {
    const Pose& frame = frames[j];
    const JointSpec& joint = arm.joints[j];
    const Eigen::Vector3d origin = frame.translation;
    const Eigen::Vector3d link_weight = joint.link_mass * arm.gravity;
    const Eigen::Vector3d com = frame * joint.link_com;
    // shift the distal interface load to this joint, then add link gravity
    moment += (distal_point - origin).cross(force);
    moment -= (com - origin).cross(link_weight);
    force -= link_weight;
    tau[j] = (frame.rotation * joint.axis).dot(moment);
    distal_point = origin;
  }
  return tau;
}

Eigen::VectorXd StaticJointTorques(const ArmModel& arm, const Eigen::VectorXd& q,
                                   const Wrench& ee_load) {
  return StaticJointTorques(arm, ForwardKinematics(arm, q, LimitPolicy::kIgnore), ee_load);
}

Eigen::VectorXd FreeMotionTorques(const ArmModel& arm, const Eigen::VectorXd& q) {
  return StaticJointTorques(arm, q, Wrench{});
}

}  // namespace inertia
