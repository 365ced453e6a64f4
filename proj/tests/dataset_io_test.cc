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

#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "inertia/errors.h"
#include "test_util.h"

namespace inertia {
namespace {

bool BitEqual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

Dataset SampleData() {
  const ArmModel arm = testing::DefaultArm();
  ControllerSpec c;
  c.kp = Eigen::Vector4d(20, 25, 20, 8);
  c.friction_coulomb = Eigen::Vector4d::Constant(0.03);
  c.friction_position_gain = Eigen::Vector4d::Constant(0.03);
  c.encoder_noise_sd = Eigen::Vector4d::Constant(1e-4);
  c.sensor_noise_sd = 0.015;
  c.sensor_bias = Eigen::Vector4d(0.01, -0.02, 0.015, -0.01);
  return GenerateRandomSamples(arm, c, {{"none", {}, 1.0}, {"m", {0.0733, {0.011, -0.007, -0.02}}, 0.07}},
                               50, {5, 1});
}

TEST(DatasetIo, BitExactRoundTrip) {
  Dataset data = SampleData();
  data.rejected = 3;
  std::stringstream buf;
  WriteDataset(buf, {"train", "abc", 5, 4, data.samples.size(), 3}, data);
  DatasetHeader header;
  const Dataset back = ReadDataset(buf, &header);
  EXPECT_EQ(header.kind, "train");
  EXPECT_EQ(header.config_hash, "abc");
  EXPECT_EQ(header.seed, 5u);
  EXPECT_EQ(header.count, data.samples.size());
  EXPECT_EQ(header.rejected, 3u);
  ASSERT_EQ(back.samples.size(), data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& a = data.samples[i];
    const auto& b = back.samples[i];
    EXPECT_TRUE(BitEqual(a.q_d, b.q_d));
    EXPECT_TRUE(BitEqual(a.q, b.q));
    EXPECT_TRUE(BitEqual(a.rot_dir, b.rot_dir));
    EXPECT_TRUE(BitEqual(a.tag_pose.rotation, b.tag_pose.rotation));
    EXPECT_TRUE(BitEqual(a.tag_pose.translation, b.tag_pose.translation));
    EXPECT_TRUE(BitEqual(a.tau_true, b.tau_true));
    EXPECT_TRUE(BitEqual(a.tau_g, b.tau_g));
    EXPECT_TRUE(BitEqual(a.tau_sensor_raw, b.tau_sensor_raw));
    EXPECT_EQ(a.object_id, b.object_id);
    EXPECT_EQ(a.object.mass, b.object.mass);
    EXPECT_TRUE(BitEqual(a.object.com_tag, b.object.com_tag));
  }
  // writing again reproduces the bytes
  std::stringstream again;
  WriteDataset(again, {"train", "abc", 5, 4, back.samples.size(), 3}, back);
  std::stringstream first;
  WriteDataset(first, {"train", "abc", 5, 4, data.samples.size(), 3}, data);
  EXPECT_EQ(first.str(), again.str());
}

TEST(DatasetIo, RejectsMalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(ReadDataset(empty, nullptr), DataError);
  std::stringstream no_header("{\"type\":\"sample\"}\n");
  EXPECT_THROW(ReadDataset(no_header, nullptr), DataError);

  const Dataset data = SampleData();
  std::stringstream buf;
  WriteDataset(buf, {"train", "abc", 5, 4, 0, 0}, data);
  buf.seekp(0, std::ios::end);
  buf << SampleToJson(data.samples.front()).dump() << '\n';
  EXPECT_THROW(ReadDataset(buf, nullptr), DataError);

  std::stringstream garbage;
  WriteDataset(garbage, {"train", "abc", 5, 4, 1, 0}, Dataset{});
  garbage.seekp(0, std::ios::end);
  garbage << "{not json\n";
  EXPECT_THROW(ReadDataset(garbage, nullptr), DataError);
}

TEST(DatasetIo, Fnv1aKnownValues) {
  EXPECT_EQ(Fnv1aHex(""), "cbf29ce484222325");
  EXPECT_EQ(Fnv1aHex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace inertia
