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
#include <string>

#include "cfisac/association.h"
#include "cfisac/comm_channel.h"
#include "cfisac/milp_solver.h"
#include "cfisac/scenario.h"
#include "cfisac/sens_channel.h"

namespace cfisac {

// Everything that determines a generated instance and its solve. Read from
// JSON with the sections "scenario", "comm", "sens", "problem" and "solver";
// every key is optional and defaults to the values below (the 8-AP, 10-user,
// 4-target setting). Unknown keys are rejected.
struct ExperimentConfig {
  ScenarioConfig scenario;
  CommModelParams comm;
  SensModelParams sens;
  ProblemParams problem;
  SolverConfig solver;

  void validate() const;
};

// Parses a JSON document. When scenario.lambda_max is absent it is drawn
// per dataset from {5, 10} with the master seed. Throws std::invalid_argument
// on malformed input.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON with every field spelled out (sorted keys, fixed layout).
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical JSON.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace cfisac
