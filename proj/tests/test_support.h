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
#include "cfisac/config.h"
#include "cfisac/rng.h"

namespace cfisac::testing {

// Knobs of a synthetic problem with hand-drawn statistics (no channel
// model): gains log-uniform over two decades, symmetric correlations in
// [0, 1], bistatic gains log-uniform, priority weights in [0.5, 10].
struct TinySpec {
  int n_ap = 3;
  int n_cu = 4;
  int n_tg = 2;
  int n_rf = 2;
};

AssociationProblem synthetic_problem(const TinySpec& spec, RngStream& rng);

// A small configuration of the full generator (scenario + channels).
ExperimentConfig tiny_config(int n_ap, int n_cu, int n_tg, int n_rf,
                             std::uint64_t master_seed);

// Random nu, rho_th, alpha and caps on top of a generated instance.
AssociationProblem randomized_tiny_instance(std::uint64_t seed);

// Fresh directory under the system temp path.
std::string scratch_dir(const std::string& name);

}  // namespace cfisac::testing
