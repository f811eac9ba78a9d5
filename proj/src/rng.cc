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

#include "cfisac/rng.h"

namespace cfisac {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t instance_id,
                          std::string_view purpose_tag) {
  const std::uint64_t s0 = splitmix64(master_seed);
  const std::uint64_t s1 =
      splitmix64(s0 ^ splitmix64(instance_id + 0x632be59bd9b4e019ULL));
  return splitmix64(s1 ^ fnv1a64(purpose_tag));
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t instance_id,
                        std::string_view purpose_tag) {
  const std::uint64_t s = stream_seed(master_seed, instance_id, purpose_tag);
  std::seed_seq seq{static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(s >> 32)};
  return RngStream(seq);
}

}  // namespace cfisac
