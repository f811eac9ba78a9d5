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
#include <string_view>

#include "cfisac/association.h"

namespace cfisac {

enum class BaselinePolicy : std::uint8_t {
  kMilpAligned,
  kChannelOnly,
  kCommOnly,
  kSensOnly,
};

std::string_view to_string(BaselinePolicy policy);
// Accepts "milp-aligned", "channel-only", "comm-only", "sens-only".
BaselinePolicy parse_baseline(std::string_view name);

// Counts a milp-aligned run aimed for and reached.
struct GreedyShortfall {
  int users_wanted = 0;
  int users_assigned = 0;
  int targets_wanted = 0;
  int targets_scheduled = 0;
  bool any() const {
    return users_assigned < users_wanted || targets_scheduled < targets_wanted;
  }
};

// Greedy constructor. All APs start in transmit mode. Unless the policy is
// comm-only, targets are taken in descending order of score times their best
// off-diagonal bistatic gain and each gets its best feasible (a_t, a_r)
// pair; a_r is switched to receive mode only while it holds no assignment.
// Unless the policy is sens-only, (AP, user) pairs are then added in
// descending score order while the AP transmits, has a free RF chain and
// the correlation rule holds. The score is the priority weight times the
// gain, except for channel-only which uses the raw gain. milp-aligned stops
// each phase at the reference's number of assignments (sum of x) and
// scheduled targets (sum of s) and requires `reference`.
AssociationSolution greedy_solve(const AssociationProblem& problem,
                                 BaselinePolicy policy,
                                 const AssociationSolution* reference = nullptr,
                                 GreedyShortfall* shortfall = nullptr);

}  // namespace cfisac
