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

#include <fstream>

#include <gtest/gtest.h>

#include "cfisac/config.h"
#include "cfisac/pipeline.h"
#include "test_support.h"

namespace cfisac {
namespace {

TEST(Config, EmptyDocumentGivesDefaults) {
  const ExperimentConfig cfg = config_from_json("{}");
  EXPECT_EQ(cfg.scenario.n_ap, 8);
  EXPECT_EQ(cfg.scenario.n_cu, 10);
  EXPECT_EQ(cfg.scenario.n_tg, 4);
  EXPECT_EQ(cfg.scenario.n_rf_per_ap, 4);
  EXPECT_EQ(cfg.scenario.m_antennas, 16);
  EXPECT_EQ(cfg.solver.time_budget_s, 120.0);
  EXPECT_EQ(cfg.scenario.lambda_max, draw_dataset_lambda_max(cfg.scenario.master_seed));
}

TEST(Config, LambdaMaxFollowsSeedUnlessGiven) {
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const std::string doc = R"({"scenario": {"master_seed": )" + std::to_string(seed) + "}}";
    EXPECT_EQ(config_from_json(doc).scenario.lambda_max, draw_dataset_lambda_max(seed));
  }
  EXPECT_EQ(config_from_json(R"({"scenario": {"lambda_max": 7.5}})").scenario.lambda_max, 7.5);
}

TEST(Config, CanonicalJsonRoundTrip) {
  ExperimentConfig cfg = config_from_json(R"({
    "scenario": {"n_ap": 5, "est_noise_var": 0.01, "lambda_max": 5},
    "problem": {"nu": 0.3, "c_rx": [1, 2, 3, 4, 1]},
    "solver": {"search": "best-first", "branching_rule": "pseudo-cost"}})");
  EXPECT_EQ(cfg.scenario.est_noise_var, 0.01);
  EXPECT_EQ(cfg.solver.search, SearchOrder::kBestFirst);
  const std::string text = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
  cfg.problem.nu = 0.31;
  EXPECT_NE(config_hash(back), config_hash(cfg));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(config_from_json("not json"), std::invalid_argument);
  EXPECT_THROW(config_from_json("[]"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"extra": {}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"scenario": {"n_aps": 3}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"scenario": {"n_ap": "three"}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"scenario": {"n_ap": 0}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"solver": {"search": "random"}})"), std::invalid_argument);
  EXPECT_THROW(config_from_json(R"({"problem": {"c_rx": [1, 2]}})"), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST(Config, LoadsFromFile) {
  const std::string dir = testing::scratch_dir("config");
  const std::string path = dir + "/cfg.json";
  std::ofstream(path) << R"({"scenario": {"n_cu": 6, "lambda_max": 10}})";
  EXPECT_EQ(load_config(path).scenario.n_cu, 6);
}

TEST(Pipeline, InstancesAreDeterministicAndAlphaIndependent) {
  const ExperimentConfig cfg = config_from_json("{}");
  const Instance a = make_instance(cfg, 3);
  const Instance b = make_instance(cfg, 3);
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_EQ(a.problem.comm.gains, b.problem.comm.gains);
  EXPECT_EQ(a.problem.sens_gain, b.problem.sens_gain);

  const Instance c = make_instance(cfg, 3, {.alpha = 0.25, .unit_priorities = true});
  EXPECT_EQ(c.problem.alpha, 0.25);
  EXPECT_EQ(c.problem.comm.gains, a.problem.comm.gains);
  EXPECT_EQ(c.problem.sens_gain, a.problem.sens_gain);
  for (double l : c.problem.lambda_cu) EXPECT_EQ(l, 1.0);
  for (double l : c.problem.lambda_tg) EXPECT_EQ(l, 1.0);
  EXPECT_THROW(make_instance(cfg, 3, {.alpha = 1.5}), std::invalid_argument);
}

TEST(Pipeline, ProblemMatchesConfig) {
  ExperimentConfig cfg = config_from_json(R"({"problem": {"nu": 0.7, "rho_th": 0.2}})");
  const Instance inst = make_instance(cfg, 0);
  EXPECT_EQ(inst.problem.n_ap(), 8);
  EXPECT_EQ(inst.problem.n_cu(), 10);
  EXPECT_EQ(inst.problem.n_tg(), 4);
  EXPECT_EQ(inst.problem.nu, 0.7);
  EXPECT_EQ(inst.problem.rho_th, 0.2);
  for (int a = 0; a < 8; ++a) {
    EXPECT_EQ(inst.problem.n_rf[a], 4);
    EXPECT_EQ(inst.problem.c_rx[a], 4);
  }
  EXPECT_NO_THROW(inst.problem.validate());
}

}  // namespace
}  // namespace cfisac
