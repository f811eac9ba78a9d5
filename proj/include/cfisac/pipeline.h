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
#include <optional>

#include "cfisac/association.h"
#include "cfisac/comm_channel.h"
#include "cfisac/config.h"
#include "cfisac/scenario.h"
#include "cfisac/sens_channel.h"

namespace cfisac {

struct Instance {
  std::uint64_t instance_id = 0;
  Scenario scenario;
  CommStats comm;
  SensStats sens;
  AssociationProblem problem;
};

struct InstanceOptions {
  // Replaces the sampled trade-off parameter.
  std::optional<double> alpha;
  // Sets every priority weight to one.
  bool unit_priorities = false;
};

// scenario -> channel statistics -> problem. Channel draws use the streams
// "comm" and "sens" of (master_seed, instance_id), so the statistics do not
// depend on the options.
Instance make_instance(const ExperimentConfig& cfg, std::uint64_t instance_id,
                       const InstanceOptions& options = {});

}  // namespace cfisac
