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
#include <span>
#include <vector>

#include "cfisac/association.h"
#include "cfisac/lp_solver.h"
#include "cfisac/milp_encoding.h"

namespace cfisac {

enum class BranchingRule : std::uint8_t { kMostFractional, kPseudoCost };
enum class SearchOrder : std::uint8_t { kBestFirst, kDepthFirstDive };

struct SolverConfig {
  double time_budget_s = 120.0;
  double gap_tolerance = 0.0;
  std::int64_t node_limit = 50'000'000;
  BranchingRule branching_rule = BranchingRule::kMostFractional;
  SearchOrder search = SearchOrder::kDepthFirstDive;
  // Lexicographic tie polish; only runs after a search that closed the gap
  // with gap_tolerance == 0.
  bool tie_polish = true;
  // Bound with the projected relaxation (w eliminated, only the product rows
  // that can bind kept). Off means the full encoded relaxation.
  bool reduced_relaxation = true;

  void validate() const;
};

struct VarFixing {
  int var = 0;
  double value = 0.0;
};

struct LpRelaxation {
  LpStatus status = LpStatus::kOptimal;
  double value = 0.0;
  std::vector<double> point;  // one entry per encoded variable
  std::int64_t iterations = 0;
};

// Full relaxation of the encoding with every variable in [0, 1] and the
// given variables pinned.
LpRelaxation lp_relax_solve(const MilpEncoding& encoding,
                            std::span<const VarFixing> fixed = {});

// Branch-and-bound over the 0-1 decisions. seeds are optional feasible
// starting incumbents (infeasible seeds are ignored). The result is the
// incumbent; optimal is set when the tree was exhausted or the gap closed
// within tolerance, and gap is (best_bound - incumbent) / max(1, |incumbent|).
AssociationSolution branch_and_bound(
    const MilpEncoding& encoding, const SolverConfig& config = {},
    std::span<const AssociationSolution> seeds = {});

inline constexpr std::uint64_t kDefaultLeafCap = std::uint64_t{1} << 30;

// Number of decision tuples brute_force_solve would visit.
std::uint64_t brute_force_leaf_count(const AssociationProblem& problem);

// Exhaustive enumeration over mode patterns, per-AP user subsets and
// per-target transmitter / receiver sets. Returns the lexicographically
// smallest optimum (canonical bit order, ties within tie_slack). Throws
// std::length_error when the leaf count exceeds leaf_cap.
AssociationSolution brute_force_solve(const AssociationProblem& problem,
                                      std::uint64_t leaf_cap = kDefaultLeafCap);

}  // namespace cfisac
