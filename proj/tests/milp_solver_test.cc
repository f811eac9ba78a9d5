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

#include "cfisac/milp_solver.h"
#include "test_support.h"

namespace cfisac {
namespace {

using testing::randomized_tiny_instance;
using testing::synthetic_problem;

SolverConfig exact() {
  SolverConfig cfg;
  cfg.time_budget_s = 60.0;
  return cfg;
}

TEST(LpRelaxation, AllFixedEqualsObjective) {
  RngStream rng = derive_stream(1, 0, "milp");
  const AssociationProblem p = synthetic_problem({3, 3, 2, 2}, rng);
  const MilpEncoding enc = encode(p);
  const AssociationSolution best = brute_force_solve(p);
  const std::vector<double> values = enc.assignment_of(best);
  std::vector<VarFixing> fixed;
  for (int v = 0; v < enc.num_vars(); ++v) fixed.push_back({v, values[v]});
  const LpRelaxation r = lp_relax_solve(enc, fixed);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, total_objective(p, best), 1e-9);
}

TEST(LpRelaxation, ZeroObjectiveGivesZero) {
  RngStream rng = derive_stream(2, 0, "milp");
  AssociationProblem p = synthetic_problem({2, 2, 1, 2}, rng);
  p.alpha = 0.5;
  p.comm.gains.setZero();
  for (double& g : p.sens_gain.data()) g = 0.0;
  std::fill(p.mu.begin(), p.mu.end(), 0.0);
  const LpRelaxation r = lp_relax_solve(encode(p));
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(LpRelaxation, BoundsTheIntegerOptimum) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const AssociationProblem p = randomized_tiny_instance(1000 + seed);
    const LpRelaxation r = lp_relax_solve(encode(p));
    ASSERT_EQ(r.status, LpStatus::kOptimal);
    EXPECT_GE(r.value, brute_force_solve(p).objective - 1e-9);
  }
}

TEST(LpRelaxation, FixingNeverRaisesTheBound) {
  RngStream rng = derive_stream(3, 0, "milp");
  const AssociationProblem p = synthetic_problem({3, 4, 2, 2}, rng);
  const MilpEncoding enc = encode(p);
  const double root = lp_relax_solve(enc).value;
  for (int v = 0; v < enc.num_decision_vars(); ++v) {
    for (double value : {0.0, 1.0}) {
      const VarFixing fix{v, value};
      const LpRelaxation r = lp_relax_solve(enc, std::span(&fix, 1));
      if (r.status == LpStatus::kOptimal) {
        EXPECT_LE(r.value, root + 1e-9);
      }
    }
  }
}

TEST(BranchAndBound, SeparableSingleApPicksTopUsers) {
  RngStream rng = derive_stream(4, 0, "milp");
  AssociationProblem p = synthetic_problem({1, 6, 0, 3}, rng);
  p.alpha = 1.0;
  p.nu = 0.0;
  p.rho_th = 1.0;
  p.mu = {0.0};
  const AssociationSolution sol = branch_and_bound(encode(p), exact());
  std::vector<int> order(6);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return p.lambda_cu[a] * p.comm.gains(0, a) > p.lambda_cu[b] * p.comm.gains(0, b);
  });
  ASSERT_EQ(sol.tau[0], 1);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(sol.x(0, order[k]), k < 3 ? 1 : 0);
  EXPECT_TRUE(sol.optimal);
}

TEST(BranchAndBound, MatchesBruteForceOnTinyInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RngStream rng = derive_stream(seed, 0, "milp-oracle");
    std::uniform_int_distribution<int> na(2, 3), nc(1, 4), nt(0, 2), rf(1, 3);
    const AssociationProblem p =
        (seed % 2 == 0) ? randomized_tiny_instance(seed)
                        : synthetic_problem({na(rng), nc(rng), nt(rng), rf(rng)}, rng);
    const AssociationSolution bf = brute_force_solve(p);
    const AssociationSolution bb = branch_and_bound(encode(p), exact());
    ASSERT_TRUE(verify_feasible(p, bb).feasible) << seed;
    EXPECT_TRUE(bb.optimal) << seed;
    EXPECT_EQ(bb.gap, 0.0) << seed;
    EXPECT_NEAR(bb.objective, bf.objective, 1e-9) << seed;
    EXPECT_TRUE(bb.same_decisions(bf)) << seed;
    EXPECT_GE(bb.objective, 0.0);
  }
}

TEST(BranchAndBound, SearchVariantsAgree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const AssociationProblem p = randomized_tiny_instance(500 + seed);
    const MilpEncoding enc = encode(p);
    const AssociationSolution ref = branch_and_bound(enc, exact());
    for (int variant = 0; variant < 3; ++variant) {
      SolverConfig cfg = exact();
      if (variant == 0) cfg.branching_rule = BranchingRule::kPseudoCost;
      if (variant == 1) cfg.search = SearchOrder::kBestFirst;
      if (variant == 2) cfg.reduced_relaxation = false;
      const AssociationSolution sol = branch_and_bound(enc, cfg);
      EXPECT_NEAR(sol.objective, ref.objective, 1e-9) << seed << " " << variant;
      EXPECT_TRUE(sol.same_decisions(ref)) << seed << " " << variant;
    }
  }
}

TEST(BranchAndBound, Deterministic) {
  const AssociationProblem p = randomized_tiny_instance(77);
  const MilpEncoding enc = encode(p);
  const AssociationSolution a = branch_and_bound(enc, exact());
  const AssociationSolution b = branch_and_bound(enc, exact());
  EXPECT_TRUE(a.same_decisions(b));
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.stats.nodes, b.stats.nodes);
}

TEST(BranchAndBound, NodeLimitReportsCertifiedGap) {
  const AssociationProblem p = randomized_tiny_instance(5);
  const MilpEncoding enc = encode(p);
  SolverConfig limited = exact();
  limited.node_limit = 1;
  const AssociationSolution sol = branch_and_bound(enc, limited);
  const AssociationSolution full = branch_and_bound(enc, exact());
  EXPECT_TRUE(verify_feasible(p, sol).feasible);
  EXPECT_GE(sol.gap, 0.0);
  // The certified bound covers the true optimum.
  EXPECT_GE(sol.objective + sol.gap * std::max(1.0, std::abs(sol.objective)),
            full.objective - 1e-9);
  if (!sol.optimal) {
    EXPECT_GT(sol.gap, 0.0);
  }
}

TEST(BranchAndBound, InfeasibleSeedsAreIgnored) {
  const AssociationProblem p = randomized_tiny_instance(9);
  AssociationSolution bad = AssociationSolution::zeros(p.n_ap(), p.n_cu(), p.n_tg());
  bad.x(0, 0) = 1;  // user without a transmitting AP
  bad.objective = 1e9;
  const AssociationSolution seeded = branch_and_bound(encode(p), exact(), std::span(&bad, 1));
  EXPECT_TRUE(verify_feasible(p, seeded).feasible);
  EXPECT_NEAR(seeded.objective, brute_force_solve(p).objective, 1e-9);
}

TEST(BranchAndBound, RejectsBadConfig) {
  SolverConfig cfg;
  cfg.gap_tolerance = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.time_budget_s = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(BruteForce, SingleApSingleUser) {
  RngStream rng = derive_stream(5, 0, "milp");
  AssociationProblem p = synthetic_problem({1, 1, 0, 1}, rng);
  p.alpha = 1.0;
  p.mu = {0.0};
  const AssociationSolution sol = brute_force_solve(p);
  EXPECT_EQ(sol.tau[0], 1);
  EXPECT_EQ(sol.x(0, 0), 1);
  EXPECT_NEAR(sol.objective, 1.0, 1e-12);  // the reference is this very user
}

TEST(BruteForce, TwoApsOneTargetPicksBestPair) {
  RngStream rng = derive_stream(6, 0, "milp");
  AssociationProblem p = synthetic_problem({2, 1, 1, 1}, rng);
  p.comm.gains = Eigen::MatrixXd(2, 0);
  for (auto& r : p.comm.correlations) r = Eigen::MatrixXd(0, 0);
  p.lambda_cu.clear();
  p.alpha = 0.0;
  p.mu = {0.0, 0.0};
  p.c_rx = {1, 1};
  const AssociationSolution sol = brute_force_solve(p);
  const bool zero_tx = p.sens_gain(0, 0, 1) >= p.sens_gain(1, 0, 0);
  EXPECT_EQ(sol.s[0], 1);
  EXPECT_EQ(sol.y_tx(zero_tx ? 0 : 1, 0), 1);
  EXPECT_EQ(sol.y_rx(zero_tx ? 1 : 0, 0), 1);
  const double best = std::max(p.sens_gain(0, 0, 1), p.sens_gain(1, 0, 0));
  EXPECT_NEAR(sol.objective, p.lambda_tg[0] * best / p.u_sens_ref, 1e-12);
}

TEST(BruteForce, ApRelabelingPreservesOptimalValue) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AssociationProblem p = randomized_tiny_instance(300 + seed);
    const int na = p.n_ap();
    std::vector<int> perm(na);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    AssociationProblem q = p;
    for (int a = 0; a < na; ++a) {
      q.comm.gains.row(a) = p.comm.gains.row(perm[a]);
      q.comm.correlations[a] = p.comm.correlations[perm[a]];
      q.n_rf[a] = p.n_rf[perm[a]];
      q.c_rx[a] = p.c_rx[perm[a]];
      q.mu[a] = p.mu[perm[a]];
      for (int t = 0; t < p.n_tg(); ++t)
        for (int b = 0; b < na; ++b) q.sens_gain(a, t, b) = p.sens_gain(perm[a], t, perm[b]);
    }
    EXPECT_NEAR(brute_force_solve(q).objective, brute_force_solve(p).objective, 1e-12);
  }
}

TEST(BruteForce, RefusesLargeInstances) {
  RngStream rng = derive_stream(8, 0, "milp");
  const AssociationProblem p = synthetic_problem({8, 10, 4, 4}, rng);
  EXPECT_GT(brute_force_leaf_count(p), kDefaultLeafCap);
  EXPECT_THROW(brute_force_solve(p), std::length_error);
  const AssociationProblem small = synthetic_problem({2, 2, 1, 2}, rng);
  EXPECT_THROW(brute_force_solve(small, 1), std::length_error);
}

}  // namespace
}  // namespace cfisac
