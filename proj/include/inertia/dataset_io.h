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

#ifndef INERTIA_DATASET_IO_H_
#define INERTIA_DATASET_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "inertia/sim.h"

namespace inertia {

// First line of every dataset file.
struct DatasetHeader {
  std::string kind;         // "train", "test", "trajectory", ...
  std::string config_hash;  // hex FNV-1a of the canonical experiment config
  std::uint64_t seed = 0;
  int n_joints = 0;
  std::size_t count = 0;
  std::size_t rejected = 0;
};

nlohmann::json SampleToJson(const SteadySample& sample);
SteadySample SampleFromJson(const nlohmann::json& j);

// Line-delimited JSON: header record, then one sample per line. Doubles are
// printed shortest-round-trip, so Read(Write(d)) == d bit for bit.
void WriteDataset(std::ostream& out, const DatasetHeader& header, const Dataset& data);
void WriteDatasetFile(const std::string& path, const DatasetHeader& header, const Dataset& data);
Dataset ReadDataset(std::istream& in, DatasetHeader* header);
Dataset ReadDatasetFile(const std::string& path, DatasetHeader* header);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string Fnv1aHex(const std::string& bytes);

}  // namespace inertia

#endif  // INERTIA_DATASET_IO_H_
