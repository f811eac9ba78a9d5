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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "cfisac/association.h"
#include "test_support.h"

namespace cfisac {
namespace {

using testing::synthetic_problem;
using testing::TinySpec;

CommStats flat_comm(int na, int nc, double gain, double rho) {
  CommStats c;
  c.gains = Eigen::MatrixXd::Constant(na, nc, gain);
  for (int a = 0; a < na; ++a) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(nc, nc, rho);
    r.diagonal().setOnes();
    c.correlations.push_back(r);
  }
  return c;
}

// Largest sum of at most k entries, by enumerating every subset.
double best_subset_sum(const std::vector<double>& v, int k) {
  const int n = static_cast<int>(v.size());
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > k) continue;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sum += v[i];
    best = std::max(best, sum);
  }
  return best;
}

TEST(ModeReward, SingleStrongestUser) {
  CommStats c = flat_comm(2, 1, 0.0, 0.0);
  c.gains(0, 0) = 4.0;
  c.gains(1, 0) = 1.0;
  const Eigen::VectorXd mu = mode_reward(c, {3.0});
  EXPECT_DOUBLE_EQ(mu(0), 3.0);
  EXPECT_DOUBLE_EQ(mu(1), 0.75);
}

TEST(ModeReward, UniformGainsGiveEqualRewards) {
  const Eigen::VectorXd mu = mode_reward(flat_comm(4, 3, 2.0, 0.0), {1.0, 1.0, 1.0});
  for (int a = 0; a < 4; ++a) EXPECT_DOUBLE_EQ(mu(a), 3.0);
}

TEST(ModeReward, MatchesDirectSummation) {
  RngStream rng = derive_stream(1, 0, "assoc");
  const AssociationProblem p = synthetic_problem({4, 5, 1, 2}, rng);
  const Eigen::VectorXd mu = mode_reward(p.comm, p.lambda_cu);
  const double gmax = p.comm.gains.maxCoeff();
  for (int a = 0; a < 4; ++a) {
    double sum = 0.0;
    for (int u = 0; u < 5; ++u) sum += p.lambda_cu[u] * p.comm.gains(a, u) / gmax;
    EXPECT_NEAR(mu(a), sum, 1e-12);
    EXPECT_NEAR(p.mu[a], sum, 1e-12);
  }
}

TEST(ModeReward, AllZeroGainsRejected) {
  EXPECT_THROW(mode_reward(flat_comm(2, 2, 0.0, 0.0), {1.0, 1.0}), std::invalid_argument);
}

TEST(CommUtility, Examples) {
  CommStats c = flat_comm(1, 2, 0.0, 1.0);
  c.gains(0, 0) = 0.3;
  c.gains(0, 1) = 0.5;
  ProblemParams params;
  params.nu = 0.4;
  const AssociationProblem p =
      make_problem(c, Grid3<double>(1, 0, 1), {1.0, 1.0}, {}, 1.0, params, {2});
  BinaryGrid x(1, 2, 0);
  EXPECT_EQ(comm_utility(p, x), 0.0);
  x(0, 0) = x(0, 1) = 1;
  EXPECT_NEAR(comm_utility(p, x), 0.8 - 0.4 * 0.8, 1e-15);

  AssociationProblem free = p;
  free.nu = 0.0;
  free.lambda_cu = {2.0, 3.0};
  EXPECT_NEAR(comm_utility(free, x), 2.0 * 0.3 + 3.0 * 0.5, 1e-15);
}

TEST(CommUtility, PermutationEquivariant) {
  RngStream rng = derive_stream(2, 0, "assoc");
  const AssociationProblem p = synthetic_problem({3, 4, 0, 3}, rng);
  const std::vector<int> perm = {2, 0, 3, 1};
  AssociationProblem q = p;
  for (int u = 0; u < 4; ++u) {
    q.lambda_cu[u] = p.lambda_cu[perm[u]];
    for (int a = 0; a < 3; ++a) {
      q.comm.gains(a, u) = p.comm.gains(a, perm[u]);
      for (int v = 0; v < 4; ++v)
        q.comm.correlations[a](u, v) = p.comm.correlations[a](perm[u], perm[v]);
    }
  }
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    BinaryGrid x(3, 4), xq(3, 4);
    for (int a = 0; a < 3; ++a)
      for (int u = 0; u < 4; ++u) x(a, perm[u]) = xq(a, u) = bit(rng);
    EXPECT_NEAR(comm_utility(p, x), comm_utility(q, xq), 1e-12);
  }
}

TEST(SensUtility, Examples) {
  RngStream rng = derive_stream(3, 0, "assoc");
  const AssociationProblem p = synthetic_problem({3, 2, 2, 2}, rng);
  BinaryVector s(2, 0);
  BinaryGrid ytx(3, 2, 1), yrx(3, 2, 1);
  EXPECT_EQ(sens_utility(p, s, ytx, yrx), 0.0);

  s[1] = 1;
  ytx = BinaryGrid(3, 2, 0);
  yrx = BinaryGrid(3, 2, 0);
  ytx(2, 1) = 1;
  yrx(0, 1) = 1;
  EXPECT_NEAR(sens_utility(p, s, ytx, yrx), p.lambda_tg[1] * p.sens_gain(2, 1, 0), 1e-15);
}

TEST(SensUtility, MatchesTripleLoop) {
  RngStream rng = derive_stream(4, 0, "assoc");
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const AssociationProblem p = synthetic_problem({4, 1, 3, 2}, rng);
    BinaryVector s(3);
    BinaryGrid ytx(4, 3), yrx(4, 3);
    for (auto& b : s) b = bit(rng);
    for (auto& b : ytx.data()) b = bit(rng);
    for (auto& b : yrx.data()) b = bit(rng);
    double expected = 0.0;
    for (int t = 0; t < 3; ++t)
      for (int at = 0; at < 4; ++at)
        for (int ar = 0; ar < 4; ++ar)
          expected += p.lambda_tg[t] * s[t] * ytx(at, t) * yrx(ar, t) * p.sens_gain(at, t, ar);
    EXPECT_NEAR(sens_utility(p, s, ytx, yrx), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(NormalizationRefs, SingleApSingleUser) {
  CommStats c = flat_comm(1, 1, 0.25, 0.0);
  const AssociationProblem p =
      make_problem(c, Grid3<double>(1, 0, 1), {3.0}, {}, 0.5, ProblemParams{}, {4});
  EXPECT_DOUBLE_EQ(p.u_comm_ref, 0.75);
  EXPECT_DOUBLE_EQ(p.u_sens_ref, kRefFloor);
}

TEST(NormalizationRefs, UnitCapsUseBestOffDiagonalGain) {
  RngStream rng = derive_stream(5, 0, "assoc");
  AssociationProblem p = synthetic_problem({3, 2, 2, 2}, rng);
  p.k_tx = p.k_rx = 1;
  p.sens_gain(0, 0, 0) = 100.0;  // self pair never counts
  double expected = 0.0;
  for (int t = 0; t < 2; ++t) {
    double best = 0.0;
    for (int at = 0; at < 3; ++at)
      for (int ar = 0; ar < 3; ++ar)
        if (at != ar) best = std::max(best, p.sens_gain(at, t, ar));
    expected += p.lambda_tg[t] * best;
  }
  EXPECT_NEAR(normalization_refs(p).u_sens_ref, expected, 1e-12 * expected);
}

TEST(NormalizationRefs, MatchesSubsetEnumeration) {
  RngStream rng = derive_stream(6, 0, "assoc");
  for (int trial = 0; trial < 50; ++trial) {
    AssociationProblem p = synthetic_problem({3, 5, 2, 2}, rng);
    double comm = 0.0;
    for (int a = 0; a < 3; ++a) {
      std::vector<double> w;
      for (int u = 0; u < 5; ++u) w.push_back(p.lambda_cu[u] * p.comm.gains(a, u));
      comm += best_subset_sum(w, p.n_rf[a]);
    }
    double sens = 0.0;
    for (int t = 0; t < 2; ++t) {
      std::vector<double> w;
      for (int at = 0; at < 3; ++at)
        for (int ar = 0; ar < 3; ++ar)
          if (at != ar) w.push_back(p.sens_gain(at, t, ar));
      sens += p.lambda_tg[t] * best_subset_sum(w, p.k_tx * p.k_rx);
    }
    const NormalizationRefs refs = normalization_refs(p);
    EXPECT_NEAR(refs.u_comm_ref, comm, 1e-12 * comm);
    EXPECT_NEAR(refs.u_sens_ref, sens, 1e-12 * sens);
  }
}

TEST(TotalObjective, ZeroSolutionIsZero) {
  RngStream rng = derive_stream(7, 0, "assoc");
  const AssociationProblem p = synthetic_problem({3, 4, 2, 2}, rng);
  EXPECT_EQ(total_objective(p, AssociationSolution::zeros(3, 4, 2)), 0.0);
}

TEST(TotalObjective, CommOnlyTerms) {
  RngStream rng = derive_stream(8, 0, "assoc");
  AssociationProblem p = synthetic_problem({2, 3, 1, 2}, rng);
  p.alpha = 1.0;
  AssociationSolution sol = AssociationSolution::zeros(2, 3, 1);
  sol.tau = {1, 1};
  sol.x(0, 1) = 1;
  sol.x(1, 2) = 1;
  ASSERT_TRUE(verify_feasible(p, sol).feasible);
  const double expected = (p.lambda_cu[1] * p.comm.gains(0, 1) +
                           p.lambda_cu[2] * p.comm.gains(1, 2)) /
                              p.u_comm_ref +
                          p.mu[0] + p.mu[1];
  EXPECT_NEAR(total_objective(p, sol), expected, 1e-12);
}

TEST(TotalObjective, InfeasibleRejected) {
  RngStream rng = derive_stream(9, 0, "assoc");
  const AssociationProblem p = synthetic_problem({2, 2, 1, 2}, rng);
  AssociationSolution sol = AssociationSolution::zeros(2, 2, 1);
  sol.x(0, 0) = 1;
  EXPECT_THROW(total_objective(p, sol), std::invalid_argument);
  EXPECT_NO_THROW(objective_unchecked(p, sol));
}

bool has(const FeasibilityReport& r, ConstraintFamily f) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [f](const Violation& v) { return v.family == f; });
}

TEST(VerifyFeasible, ConstraintFamilies) {
  RngStream rng = derive_stream(10, 0, "assoc");
  AssociationProblem p = synthetic_problem({3, 3, 1, 2}, rng);
  p.k_tx = p.k_rx = 1;
  p.c_rx = {1, 1, 1};
  p.rho_th = 0.5;
  for (auto& r : p.comm.correlations) r(0, 1) = r(1, 0) = 0.8;

  const AssociationSolution zero = AssociationSolution::zeros(3, 3, 1);
  EXPECT_TRUE(verify_feasible(p, zero).feasible);

  AssociationSolution sol = zero;
  sol.x(0, 0) = 1;
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kUserNeedsTxMode));

  sol = zero;
  sol.s[0] = 1;
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kTxMinimum));
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kRxMinimum));

  sol = zero;
  sol.tau = {1, 0, 0};
  sol.y_rx(0, 0) = 1;
  sol.y_tx(1, 0) = 1;
  const FeasibilityReport r = verify_feasible(p, sol);
  EXPECT_TRUE(has(r, ConstraintFamily::kReceptionNeedsRxMode));
  EXPECT_TRUE(has(r, ConstraintFamily::kIlluminationNeedsTxMode));
  EXPECT_TRUE(has(r, ConstraintFamily::kTxReserve));

  sol = zero;
  sol.tau = {1, 1, 1};
  sol.x(0, 0) = sol.x(0, 1) = 1;
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kCorrelationConflict));
  sol.x(0, 1) = 0;
  sol.x(0, 2) = 1;
  EXPECT_EQ(verify_feasible(p, sol).feasible,
            std::max(p.comm.correlations[0](0, 2), p.comm.correlations[0](2, 0)) <= p.rho_th);

  sol = zero;
  sol.tau = {1, 1, 0};
  sol.s[0] = 1;
  sol.y_tx(0, 0) = sol.y_tx(1, 0) = 1;
  sol.y_rx(2, 0) = 1;
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kTxCap));

  sol = zero;
  sol.tau = {1, 1, 1};
  sol.x(0, 0) = sol.x(0, 2) = 1;
  p.n_rf = {1, 2, 2};
  p.comm.correlations[0](0, 2) = p.comm.correlations[0](2, 0) = 0.0;
  EXPECT_TRUE(has(verify_feasible(p, sol), ConstraintFamily::kRfChainLimit));
}

TEST(VerifyFeasible, ShapeMismatch) {
  RngStream rng = derive_stream(11, 0, "assoc");
  const AssociationProblem p = synthetic_problem({2, 2, 1, 2}, rng);
  const FeasibilityReport r = verify_feasible(p, AssociationSolution::zeros(2, 3, 1));
  EXPECT_FALSE(r.feasible);
  EXPECT_TRUE(has(r, ConstraintFamily::kShape));
}

TEST(CanonicalBits, OrderIsTauSXThenY) {
  AssociationSolution sol = AssociationSolution::zeros(2, 2, 1);
  sol.tau[1] = 1;
  sol.s[0] = 1;
  sol.x(1, 0) = 1;
  sol.y_rx(0, 0) = 1;
  const std::vector<std::uint8_t> expected = {0, 1, 1, 0, 0, 1, 0, 0, 0, 1, 0};
  EXPECT_EQ(sol.canonical_bits(), expected);
}

}  // namespace
}  // namespace cfisac
