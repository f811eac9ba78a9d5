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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfisac/comm_channel.h"
#include "cfisac/grid.h"

namespace cfisac {

// Hyperparameters of the association program that are not channel
// statistics. c_rx empty means "equal to each AP's RF chain count".
struct ProblemParams {
  double nu = 1.0;
  double rho_th = 0.5;
  int k_tx = 3;
  int k_rx = 3;
  std::vector<int> c_rx;
};

// One instance of the joint clustering / scheduling / mode-selection
// program. sens_gain is indexed (a_t, t, a_r).
struct AssociationProblem {
  CommStats comm;
  Grid3<double> sens_gain;
  std::vector<double> lambda_cu;
  std::vector<double> lambda_tg;
  double alpha = 0.5;
  double nu = 1.0;
  double rho_th = 0.5;
  int k_tx = 3;
  int k_rx = 3;
  std::vector<int> c_rx;
  std::vector<int> n_rf;
  std::vector<double> mu;
  double u_comm_ref = 1.0;
  double u_sens_ref = 1.0;

  int n_ap() const { return static_cast<int>(n_rf.size()); }
  int n_cu() const { return static_cast<int>(lambda_cu.size()); }
  int n_tg() const { return static_cast<int>(lambda_tg.size()); }

  // Shapes, ranges and positivity of the references.
  void validate() const;
};

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t lp_iterations = 0;
  double wall_time_s = 0.0;
};

struct AssociationSolution {
  BinaryVector tau;  // n_ap, 1 = transmit
  BinaryGrid x;      // n_ap x n_cu
  BinaryVector s;    // n_tg
  BinaryGrid y_tx;   // n_ap x n_tg
  BinaryGrid y_rx;   // n_ap x n_tg
  double objective = 0.0;
  double gap = 0.0;
  bool optimal = false;
  SolveStats stats;

  static AssociationSolution zeros(int n_ap, int n_cu, int n_tg);

  // Decision bits in the canonical order tau, s, x, y_tx, y_rx (matrices
  // row-major). Ties between optima are broken toward the lexicographically
  // smallest vector in this order.
  std::vector<std::uint8_t> canonical_bits() const;
  bool same_decisions(const AssociationSolution& other) const;
};

// mu_a = sum_u lambda_u g(a,u) / g_max. Throws std::invalid_argument when
// all gains are zero (or there are none).
Eigen::VectorXd mode_reward(const CommStats& comm,
                            const std::vector<double>& lambda_cu);

// Unnormalized communication utility with the pairwise interference
// penalty nu * rho(a,u,u') * g(a,u) for every co-scheduled pair.
double comm_utility(const AssociationProblem& problem, const BinaryGrid& x);

// Unnormalized sensing utility over scheduled targets.
double sens_utility(const AssociationProblem& problem, const BinaryVector& s,
                    const BinaryGrid& y_tx, const BinaryGrid& y_rx);

struct NormalizationRefs {
  double u_comm_ref = 0.0;
  double u_sens_ref = 0.0;
};

inline constexpr double kRefFloor = 1e-12;

// References under full utilization: per AP the n_rf largest lambda_u g(a,u)
// and per target lambda_t times the k_tx * k_rx largest off-diagonal
// bistatic gains. Both floored at kRefFloor.
NormalizationRefs normalization_refs(const AssociationProblem& problem);

// Assembles a complete problem: copies the statistics, computes mu and the
// normalization references.
AssociationProblem make_problem(CommStats comm, Grid3<double> sens_gain,
                                std::vector<double> lambda_cu,
                                std::vector<double> lambda_tg, double alpha,
                                const ProblemParams& params,
                                const std::vector<int>& n_rf);

enum class ConstraintFamily {
  kShape,
  kUserNeedsTxMode,
  kIlluminationNeedsTxMode,
  kReceptionNeedsRxMode,
  kRfChainLimit,
  kCorrelationConflict,
  kTxReserve,
  kRxReserve,
  kTxMinimum,
  kRxMinimum,
  kTxCap,
  kRxCap,
  kRxCapacity,
};

std::string_view to_string(ConstraintFamily family);

struct Violation {
  ConstraintFamily family;
  std::vector<int> indices;
  std::string describe() const;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

FeasibilityReport verify_feasible(const AssociationProblem& problem,
                                  const AssociationSolution& solution);

// alpha * U_comm / u_comm_ref + (1 - alpha) * U_sens / u_sens_ref
// + sum_a mu_a tau_a. Throws std::invalid_argument for infeasible input.
double total_objective(const AssociationProblem& problem,
                       const AssociationSolution& solution);

// Same value without the feasibility check.
double objective_unchecked(const AssociationProblem& problem,
                           const AssociationSolution& solution);

// Relative tolerance under which two objective values count as tied.
inline constexpr double kTieTolerance = 1e-9;
inline double tie_slack(double objective) {
  return kTieTolerance * std::max(1.0, std::abs(objective));
}

}  // namespace cfisac
