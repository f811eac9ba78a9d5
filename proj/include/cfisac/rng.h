// Copyright 2026 The cfisac Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cfisac {

using RngStream = std::mt19937_64;

// Seed derivation rule, shared by every stochastic component:
//
//   s0 = splitmix64(master_seed)
//   s1 = splitmix64(s0 ^ splitmix64(instance_id + 0x632be59bd9b4e019))
//   s2 = splitmix64(s1 ^ fnv1a64(purpose_tag))
//
// s2 seeds a mt19937_64 through a seed_seq of its two 32-bit halves. Equal
// (master_seed, instance_id, purpose_tag) triples give identical streams.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t instance_id,
                          std::string_view purpose_tag);
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t instance_id,
                        std::string_view purpose_tag);

// Circularly-symmetric complex normal helper: each component N(0, 1/2).
inline double half_normal_component(RngStream& rng) {
  std::normal_distribution<double> n(0.0, 0.70710678118654752440);
  return n(rng);
}

}  // namespace cfisac
