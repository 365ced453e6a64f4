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

#include "inertia/dataset_io.h"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "inertia/errors.h"

namespace inertia {
namespace {

nlohmann::json VecToJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd VecFromJson(const nlohmann::json& j, int n, const char* field) {
  const auto values = j.at(field).get<std::vector<double>>();
  if (n >= 0 && static_cast<int>(values.size()) != n) {
    throw DataError(std::string("sample field ") + field + " has wrong length");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json SampleToJson(const SteadySample& s) {
  return {{"q_d", VecToJson(s.q_d)},
          {"q", VecToJson(s.q)},
          {"rot_dir", VecToJson(s.rot_dir)},
          {"tag_pose", PoseToJson(s.tag_pose)},
          {"tau_true", VecToJson(s.tau_true)},
          {"tau_g", VecToJson(s.tau_g)},
          {"tau_sensor_raw", VecToJson(s.tau_sensor_raw)},
          {"object_id", s.object_id},
          {"object",
           {{"mass", s.object.mass},
            {"com_tag", {s.object.com_tag.x(), s.object.com_tag.y(), s.object.com_tag.z()}}}}};
}

SteadySample SampleFromJson(const nlohmann::json& j) {
  SteadySample s;
  try {
    s.q_d = VecFromJson(j, -1, "q_d");
    const int n = static_cast<int>(s.q_d.size());
    s.q = VecFromJson(j, n, "q");
    s.rot_dir = VecFromJson(j, n, "rot_dir");
    s.tau_true = VecFromJson(j, n, "tau_true");
    s.tau_g = VecFromJson(j, n, "tau_g");
    s.tau_sensor_raw = VecFromJson(j, n, "tau_sensor_raw");
    s.tag_pose = PoseFromJson(j.at("tag_pose"));
    s.object_id = j.at("object_id").get<std::string>();
    s.object.mass = j.at("object").at("mass").get<double>();
    const auto com = j.at("object").at("com_tag").get<std::vector<double>>();
    if (com.size() != 3) throw DataError("object com_tag must have 3 entries");
    s.object.com_tag = {com[0], com[1], com[2]};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed sample record: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed sample record: ") + e.what());
  }
  for (int k = 0; k < s.rot_dir.size(); ++k) {
    if (s.rot_dir[k] != 1.0 && s.rot_dir[k] != -1.0) {
      throw DataError("sample rot_dir entries must be +1 or -1");
    }
  }
  return s;
}

void WriteDataset(std::ostream& out, const DatasetHeader& header, const Dataset& data) {
  const nlohmann::json h = {{"type", "header"},
                            {"kind", header.kind},
                            {"config_hash", header.config_hash},
                            {"seed", header.seed},
                            {"n_joints", header.n_joints},
                            {"count", data.samples.size()},
                            {"rejected", data.rejected}};
  out << h.dump() << '\n';
  for (const SteadySample& s : data.samples) out << SampleToJson(s).dump() << '\n';
}

void WriteDatasetFile(const std::string& path, const DatasetHeader& header, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  WriteDataset(out, header, data);
  if (!out) throw DataError("write failed: " + path);
}

Dataset ReadDataset(std::istream& in, DatasetHeader* header) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset is empty (missing header record)");
  DatasetHeader h;
  try {
    const auto j = nlohmann::json::parse(line);
    if (j.at("type") != "header") throw DataError("first dataset record must be the header");
    h.kind = j.at("kind").get<std::string>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.n_joints = j.at("n_joints").get<int>();
    h.count = j.at("count").get<std::size_t>();
    h.rejected = j.at("rejected").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset header: ") + e.what());
  }
  Dataset data;
  data.rejected = h.rejected;
  data.samples.reserve(h.count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed dataset line: ") + e.what());
    }
    data.samples.push_back(SampleFromJson(j));
    if (data.samples.back().q_d.size() != h.n_joints) {
      throw DataError("sample joint count disagrees with header");
    }
  }
  if (data.samples.size() != h.count) throw DataError("dataset record count disagrees with header");
  if (header) *header = h;
  return data;
}

Dataset ReadDatasetFile(const std::string& path, DatasetHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path);
  return ReadDataset(in, header);
}

}  // namespace inertia
