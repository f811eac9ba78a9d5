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

#include "cfisac/config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cfisac/rng.h"
#include "json.hpp"

namespace cfisac {
namespace {

using nlohmann::json;

// Reads keys of one section, rejecting anything not consumed.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      node_ = root.at(name);
      if (!node_.is_object())
        throw std::invalid_argument(std::string("config: section '") + name +
                                    "' must be an object");
    } else {
      node_ = json::object();
    }
  }

  template <typename T>
  bool read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return false;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + name_ + "." + key +
                                  ": " + e.what());
    }
    return true;
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key))
        throw std::invalid_argument(std::string("config: unknown key ") + name_ +
                                    "." + key);
    }
  }

 private:
  std::string name_;
  json node_;
  std::set<std::string> seen_;
};

std::string search_name(SearchOrder s) {
  return s == SearchOrder::kBestFirst ? "best-first" : "depth-first-dive";
}

std::string branching_name(BranchingRule b) {
  return b == BranchingRule::kMostFractional ? "most-fractional" : "pseudo-cost";
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  comm.validate();
  sens.validate();
  solver.validate();
  if (problem.nu < 0.0) throw std::invalid_argument("config: problem.nu must be >= 0");
  if (problem.rho_th < 0.0 || problem.rho_th > 1.0)
    throw std::invalid_argument("config: problem.rho_th must be in [0, 1]");
  if (problem.k_tx < 1 || problem.k_rx < 1)
    throw std::invalid_argument("config: problem.k_tx and k_rx must be >= 1");
  if (!problem.c_rx.empty() && static_cast<int>(problem.c_rx.size()) != scenario.n_ap)
    throw std::invalid_argument("config: problem.c_rx must have n_ap entries");
  for (int c : problem.c_rx)
    if (c < 1) throw std::invalid_argument("config: problem.c_rx entries must be >= 1");
}

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config: root must be an object");
  for (const auto& [key, value] : root.items()) {
    if (key != "scenario" && key != "comm" && key != "sens" && key != "problem" &&
        key != "solver")
      throw std::invalid_argument("config: unknown section " + key);
  }

  ExperimentConfig cfg;
  {
    Section s(root, "scenario");
    ScenarioConfig& c = cfg.scenario;
    s.read("n_ap", c.n_ap);
    s.read("n_cu", c.n_cu);
    s.read("n_tg", c.n_tg);
    s.read("n_rf_per_ap", c.n_rf_per_ap);
    s.read("m_antennas", c.m_antennas);
    s.read("carrier_hz", c.carrier_hz);
    s.read("rb_subcarriers", c.rb_subcarriers);
    s.read("rb_symbols", c.rb_symbols);
    s.read("ap_circle_radius_m", c.ap_circle_radius_m);
    s.read("area_side_m", c.area_side_m);
    s.read("ap_height_m", c.ap_height_m);
    s.read("ue_height_m", c.ue_height_m);
    s.read("tg_height_m", c.tg_height_m);
    s.read("master_seed", c.master_seed);
    double est = 0.0;
    if (s.read("est_noise_var", est)) c.est_noise_var = est;
    s.read("lambda_min", c.lambda_min);
    if (!s.read("lambda_max", c.lambda_max))
      c.lambda_max = draw_dataset_lambda_max(c.master_seed);
    s.read("tg_speed_max_mps", c.tg_speed_max_mps);
    s.read("rcs_mean_min_dbsm", c.rcs_mean_min_dbsm);
    s.read("rcs_mean_max_dbsm", c.rcs_mean_max_dbsm);
    s.read("sigma_asp_min_db", c.sigma_asp_min_db);
    s.read("sigma_asp_max_db", c.sigma_asp_max_db);
    s.read("v_ref_mps", c.v_ref_mps);
    s.read("v_max_mps", c.v_max_mps);
    s.finish();
  }
  {
    Section s(root, "comm");
    CommModelParams& c = cfg.comm;
    s.read("d_corr_m", c.d_corr_m);
    s.read("n_fade_samples_per_rb", c.n_fade_samples_per_rb);
    s.read("rician_k_mean_db", c.rician_k_mean_db);
    s.read("rician_k_std_db", c.rician_k_std_db);
    s.read("asd_mean_log", c.asd_mean_log);
    s.read("asd_std_log", c.asd_std_log);
    s.read("asd_max_deg", c.asd_max_deg);
    s.read("shadow_std_los_db", c.shadow_std_los_db);
    s.read("shadow_std_nlos_db", c.shadow_std_nlos_db);
    s.read("est_error_rel_db", c.est_error_rel_db);
    s.finish();
  }
  {
    Section s(root, "sens");
    s.read("g_tx_dbi", cfg.sens.g_tx_dbi);
    s.read("g_rx_dbi", cfg.sens.g_rx_dbi);
    s.read("w_los", cfg.sens.w_los);
    s.read("w_nlos", cfg.sens.w_nlos);
    s.finish();
  }
  {
    Section s(root, "problem");
    s.read("nu", cfg.problem.nu);
    s.read("rho_th", cfg.problem.rho_th);
    s.read("k_tx", cfg.problem.k_tx);
    s.read("k_rx", cfg.problem.k_rx);
    s.read("c_rx", cfg.problem.c_rx);
    s.finish();
  }
  {
    Section s(root, "solver");
    SolverConfig& c = cfg.solver;
    s.read("time_budget_s", c.time_budget_s);
    s.read("gap_tolerance", c.gap_tolerance);
    s.read("node_limit", c.node_limit);
    std::string name;
    if (s.read("branching_rule", name)) {
      if (name == "most-fractional") c.branching_rule = BranchingRule::kMostFractional;
      else if (name == "pseudo-cost") c.branching_rule = BranchingRule::kPseudoCost;
      else throw std::invalid_argument("config: unknown branching_rule " + name);
    }
    if (s.read("search", name)) {
      if (name == "best-first") c.search = SearchOrder::kBestFirst;
      else if (name == "depth-first-dive") c.search = SearchOrder::kDepthFirstDive;
      else throw std::invalid_argument("config: unknown search " + name);
    }
    s.read("tie_polish", c.tie_polish);
    s.read("reduced_relaxation", c.reduced_relaxation);
    s.finish();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const ScenarioConfig& s = cfg.scenario;
  json scenario = {
      {"n_ap", s.n_ap},
      {"n_cu", s.n_cu},
      {"n_tg", s.n_tg},
      {"n_rf_per_ap", s.n_rf_per_ap},
      {"m_antennas", s.m_antennas},
      {"carrier_hz", s.carrier_hz},
      {"rb_subcarriers", s.rb_subcarriers},
      {"rb_symbols", s.rb_symbols},
      {"ap_circle_radius_m", s.ap_circle_radius_m},
      {"area_side_m", s.area_side_m},
      {"ap_height_m", s.ap_height_m},
      {"ue_height_m", s.ue_height_m},
      {"tg_height_m", s.tg_height_m},
      {"master_seed", s.master_seed},
      {"lambda_min", s.lambda_min},
      {"lambda_max", s.lambda_max},
      {"tg_speed_max_mps", s.tg_speed_max_mps},
      {"rcs_mean_min_dbsm", s.rcs_mean_min_dbsm},
      {"rcs_mean_max_dbsm", s.rcs_mean_max_dbsm},
      {"sigma_asp_min_db", s.sigma_asp_min_db},
      {"sigma_asp_max_db", s.sigma_asp_max_db},
      {"v_ref_mps", s.v_ref_mps},
      {"v_max_mps", s.v_max_mps},
  };
  if (s.est_noise_var) scenario["est_noise_var"] = *s.est_noise_var;
  const CommModelParams& c = cfg.comm;
  json comm = {
      {"d_corr_m", c.d_corr_m},
      {"n_fade_samples_per_rb", c.n_fade_samples_per_rb},
      {"rician_k_mean_db", c.rician_k_mean_db},
      {"rician_k_std_db", c.rician_k_std_db},
      {"asd_mean_log", c.asd_mean_log},
      {"asd_std_log", c.asd_std_log},
      {"asd_max_deg", c.asd_max_deg},
      {"shadow_std_los_db", c.shadow_std_los_db},
      {"shadow_std_nlos_db", c.shadow_std_nlos_db},
      {"est_error_rel_db", c.est_error_rel_db},
  };
  json sens = {{"g_tx_dbi", cfg.sens.g_tx_dbi},
               {"g_rx_dbi", cfg.sens.g_rx_dbi},
               {"w_los", cfg.sens.w_los},
               {"w_nlos", cfg.sens.w_nlos}};
  json problem = {{"nu", cfg.problem.nu},
                  {"rho_th", cfg.problem.rho_th},
                  {"k_tx", cfg.problem.k_tx},
                  {"k_rx", cfg.problem.k_rx}};
  if (!cfg.problem.c_rx.empty()) problem["c_rx"] = cfg.problem.c_rx;
  const SolverConfig& v = cfg.solver;
  json solver = {{"time_budget_s", v.time_budget_s},
                 {"gap_tolerance", v.gap_tolerance},
                 {"node_limit", v.node_limit},
                 {"branching_rule", branching_name(v.branching_rule)},
                 {"search", search_name(v.search)},
                 {"tie_polish", v.tie_polish},
                 {"reduced_relaxation", v.reduced_relaxation}};
  json root = {{"scenario", scenario},
               {"comm", comm},
               {"sens", sens},
               {"problem", problem},
               {"solver", solver}};
  return root.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a64(config_to_json(cfg));
}

}  // namespace cfisac
