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

#include "inertia/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "inertia/dataset_io.h"
#include "inertia/errors.h"

namespace inertia {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

Eigen::VectorXd PerJoint(const nlohmann::json& j, const char* name, int n) {
  if (j.is_number()) return Eigen::VectorXd::Constant(n, j.get<double>());
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError(std::string("controller.") + name + " needs " + std::to_string(n) +
                      " entries (or a scalar)");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

NamedObject ObjectFromJson(const nlohmann::json& j) {
  NamedObject o;
  o.name = j.at("name").get<std::string>();
  o.spec.mass = j.at("mass").get<double>();
  if (!(o.spec.mass >= 0.0)) throw ConfigError("object " + o.name + ": mass must be >= 0");
  const auto com = j.value("com_tag", std::vector<double>{0.0, 0.0, 0.0});
  if (com.size() != 3) throw ConfigError("object " + o.name + ": com_tag needs 3 entries");
  o.spec.com_tag = {com[0], com[1], com[2]};
  const auto ext = j.value("extents", std::vector<double>{0.0, 0.0, 0.0});
  if (ext.size() != 3) throw ConfigError("object " + o.name + ": extents needs 3 entries");
  o.com_scale = Eigen::Vector3d(ext[0], ext[1], ext[2]).norm();
  return o;
}

std::vector<NamedObject> ObjectsFromJson(const nlohmann::json& j) {
  std::vector<NamedObject> out;
  for (const auto& o : j) out.push_back(ObjectFromJson(o));
  return out;
}

std::vector<Eigen::Vector2d> RangesFromJson(const nlohmann::json& j) {
  std::vector<Eigen::Vector2d> ranges;
  for (const auto& r : j) {
    ranges.emplace_back(r.at(0).get<double>() * kDegToRad, r.at(1).get<double>() * kDegToRad);
  }
  return ranges;
}

TrainSchedule ScheduleFromJson(const nlohmann::json& j, TrainSchedule s) {
  s.batch_size = j.value("batch_size", s.batch_size);
  s.epochs = j.value("epochs", s.epochs);
  s.learning_rate = j.value("learning_rate", s.learning_rate);
  s.cosine_decay = j.value("cosine_decay", s.cosine_decay);
  return s;
}

void Parse(ExperimentConfig& c) {
  const nlohmann::json& j = c.effective;
  c.arm = ArmFromJson(j.at("arm"));
  const int n = c.arm.n_joints();

  const auto& jc = j.at("controller");
  c.controller.kp = PerJoint(jc.at("kp"), "kp", n);
  c.controller.friction_coulomb = PerJoint(jc.value("friction_coulomb", nlohmann::json(0.0)),
                                           "friction_coulomb", n);
  c.controller.friction_position_gain = PerJoint(
      jc.value("friction_position_gain", nlohmann::json(0.0)), "friction_position_gain", n);
  c.controller.encoder_noise_sd =
      PerJoint(jc.value("encoder_noise_sd", nlohmann::json(1e-4)), "encoder_noise_sd", n);
  c.controller.sensor_noise_sd = jc.value("sensor_noise_sd", 0.0);
  c.controller.sensor_bias =
      PerJoint(jc.value("sensor_bias", nlohmann::json(0.0)), "sensor_bias", n);
  ValidateController(c.controller, n);

  c.training_objects = ObjectsFromJson(j.at("training_objects"));
  c.testing_objects = ObjectsFromJson(j.at("testing_objects"));
  if (c.training_objects.empty() || c.testing_objects.empty()) {
    throw ConfigError("config needs training and testing objects");
  }

  const auto& jp = j.at("planning");
  c.grid.step = jp.at("grid_deg").get<double>() * kDegToRad;
  if (jp.contains("ranges_deg")) c.grid.ranges = RangesFromJson(jp["ranges_deg"]);
  c.random_per_object = j.value("random_per_object", c.random_per_object);
  c.test_per_object = j.value("test_per_object", c.test_per_object);

  if (!j.contains("seed")) throw ConfigError("config must set an explicit seed");
  c.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("identification")) {
    const auto& ji = j["identification"];
    c.window = ji.value("window", c.window);
    c.repeats = ji.value("repeats", c.repeats);
    c.wls.condition_cap = ji.value("condition_cap", c.wls.condition_cap);
    c.wls.mass_floor = ji.value("mass_floor", c.wls.mass_floor);
  }
  if (j.contains("torque_training")) {
    c.torque_schedule = ScheduleFromJson(j["torque_training"], c.torque_schedule);
    c.holdout_fraction = j["torque_training"].value("holdout_fraction", c.holdout_fraction);
  }
  c.attention.wls = c.wls;
  c.attention.window = c.window;
  if (j.contains("attention_training")) {
    const auto& ja = j["attention_training"];
    c.attention.schedule = ScheduleFromJson(ja, c.attention.schedule);
    c.attention.loss_weights.mass = ja.value("w_mass", c.attention.loss_weights.mass);
    c.attention.loss_weights.com = ja.value("w_com", c.attention.loss_weights.com);
    c.attention.window = ja.value("window", c.attention.window);
    c.attention.windows_per_object = ja.value("windows_per_object", c.attention.windows_per_object);
  }
  c.attention.seed = MixSeed(c.seed ^ 0x617474);
  if (j.contains("continuous")) {
    const auto& jt = j["continuous"];
    c.continuous.window = jt.value("window", c.continuous.window);
    c.continuous.filter_width = jt.value("filter_width", c.continuous.filter_width);
    c.continuous.trajectory.period_samples =
        jt.value("period_samples", c.continuous.trajectory.period_samples);
    if (jt.contains("ranges_deg")) c.continuous.trajectory.ranges = RangesFromJson(jt["ranges_deg"]);
    for (const auto& seg : jt.at("segments")) {
      c.continuous.trajectory.segments.push_back(
          {ObjectFromJson(seg.at("object")), seg.at("samples").get<std::size_t>()});
    }
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  if (c.window < 1 || c.repeats < 1) throw ConfigError("window and repeats must be positive");
}

}  // namespace

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig Rebuild(const ExperimentConfig& config) {
  ExperimentConfig c;
  c.effective = config.effective;
  c.hash = Fnv1aHex(c.effective.dump());
  try {
    Parse(c);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j, const std::string& base_dir) {
  ExperimentConfig c;
  c.effective = j;
  if (j.contains("arm") && j["arm"].is_string()) {
    const std::filesystem::path arm_path =
        std::filesystem::path(base_dir) / j["arm"].get<std::string>();
    c.effective["arm"] = ReadJsonFile(arm_path.string());
  }
  return Rebuild(c);
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return ExperimentConfigFromJson(ReadJsonFile(path), base);
}

ExperimentConfig WithSeed(const ExperimentConfig& config, std::uint64_t seed) {
  ExperimentConfig c = config;
  c.effective["seed"] = seed;
  return Rebuild(c);
}

}  // namespace inertia
