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

#ifndef INERTIA_RNG_H_
#define INERTIA_RNG_H_

#include <cstdint>
#include <random>

namespace inertia {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates (seed, stream) pairs.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream for (master seed, purpose tag, index). Each generated
// sample owns its stream, so results do not depend on worker count.
inline Rng StreamRng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return Rng(MixSeed(MixSeed(MixSeed(seed) ^ tag) ^ index));
}

}  // namespace inertia

#endif  // INERTIA_RNG_H_
