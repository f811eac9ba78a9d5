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

// Command-line front end: generate, solve, baseline, dataset build, sweep,
// report.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfisac/baselines.h"
#include "cfisac/config.h"
#include "cfisac/dataset.h"
#include "cfisac/eval.h"
#include "cfisac/milp_encoding.h"
#include "cfisac/milp_solver.h"
#include "cfisac/pipeline.h"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace cfisac;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config_path, "experiment config (JSON)");
  app->add_option("--seed", flags.seed, "master seed, overrides the config");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  json root = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::invalid_argument("cannot open config " + flags.config_path);
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config " + flags.config_path + ": " + e.what());
    }
  }
  if (flags.seed) root["scenario"]["master_seed"] = *flags.seed;
  return config_from_json(root.dump());
}

json grid_json(const BinaryGrid& g) {
  json rows = json::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(row);
  }
  return rows;
}

json solution_json(const AssociationSolution& s) {
  return {{"tau", s.tau},
          {"x", grid_json(s.x)},
          {"s", s.s},
          {"y_tx", grid_json(s.y_tx)},
          {"y_rx", grid_json(s.y_rx)},
          {"objective", s.objective},
          {"gap", s.gap},
          {"optimal", s.optimal},
          {"nodes", s.stats.nodes},
          {"lp_iterations", s.stats.lp_iterations},
          {"wall_time_s", s.stats.wall_time_s}};
}

json instance_json(const Instance& inst) {
  const AssociationProblem& p = inst.problem;
  auto points = [](const std::vector<Point3>& v) {
    json out = json::array();
    for (const Point3& q : v) out.push_back({q.x, q.y, q.z});
    return out;
  };
  json g_comm = json::array();
  for (int a = 0; a < p.n_ap(); ++a) {
    json row = json::array();
    for (int u = 0; u < p.n_cu(); ++u) row.push_back(p.comm.gains(a, u));
    g_comm.push_back(row);
  }
  json s_comm = json::array();
  for (int a = 0; a < p.n_ap(); ++a) {
    json mat = json::array();
    for (int u = 0; u < p.n_cu(); ++u) {
      json row = json::array();
      for (int q = 0; q < p.n_cu(); ++q) row.push_back(p.comm.correlations[a](u, q));
      mat.push_back(row);
    }
    s_comm.push_back(mat);
  }
  json g_sens = json::array();  // [a_t][a_r][t]
  for (int at = 0; at < p.n_ap(); ++at) {
    json plane = json::array();
    for (int ar = 0; ar < p.n_ap(); ++ar) {
      json row = json::array();
      for (int t = 0; t < p.n_tg(); ++t) row.push_back(p.sens_gain(at, t, ar));
      plane.push_back(row);
    }
    g_sens.push_back(plane);
  }
  return {{"instance_id", inst.instance_id},
          {"ap_positions", points(inst.scenario.ap_positions)},
          {"ue_positions", points(inst.scenario.ue_positions)},
          {"tg_positions", points(inst.scenario.tg_positions)},
          {"tg_velocities", inst.scenario.tg_velocities},
          {"alpha", p.alpha},
          {"lambda_cu", p.lambda_cu},
          {"lambda_tg", p.lambda_tg},
          {"g_comm", g_comm},
          {"s_comm", s_comm},
          {"g_sens", g_sens},
          {"mu", p.mu},
          {"u_comm_ref", p.u_comm_ref},
          {"u_sens_ref", p.u_sens_ref}};
}

void emit(const std::string& out_path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_alphas(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != item.size()) throw std::invalid_argument("bad alpha value: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free ISAC association: simulator, exact solver, baselines, datasets"};
  app.require_subcommand(1);

  CommonFlags cfg_flags;
  CLI::App* show = app.add_subcommand("config", "print the resolved config as canonical JSON");
  add_common(show, cfg_flags);

  CommonFlags gen_flags;
  std::uint64_t gen_first = 0;
  int gen_count = 1;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "generate instances and write them as JSON");
  add_common(gen, gen_flags);
  gen->add_option("--instance", gen_first, "first instance id");
  gen->add_option("--instances", gen_count, "number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output file (default stdout)");

  CommonFlags solve_flags;
  std::uint64_t solve_id = 0;
  std::optional<double> solve_alpha;
  std::string solve_out;
  std::string dump_lp;
  CLI::App* solve = app.add_subcommand("solve", "solve one instance exactly");
  add_common(solve, solve_flags);
  solve->add_option("--instance", solve_id, "instance id");
  solve->add_option("--alpha", solve_alpha, "override the sampled alpha")
      ->check(CLI::Range(0.0, 1.0));
  solve->add_option("--out", solve_out, "output file (default stdout)");
  solve->add_option("--dump-lp", dump_lp, "write the encoded rows in sparse text form");

  CommonFlags base_flags;
  std::uint64_t base_id = 0;
  std::optional<double> base_alpha;
  std::string base_policy = "comm-only";
  std::string base_out;
  CLI::App* base = app.add_subcommand("baseline", "run one greedy baseline");
  add_common(base, base_flags);
  base->add_option("--instance", base_id, "instance id");
  base->add_option("--alpha", base_alpha, "override the sampled alpha")
      ->check(CLI::Range(0.0, 1.0));
  base->add_option("--baseline", base_policy,
                   "milp-aligned|channel-only|comm-only|sens-only");
  base->add_option("--out", base_out, "output file (default stdout)");

  CommonFlags ds_flags;
  DatasetBuildOptions ds_opts;
  std::string ds_out;
  CLI::App* dataset = app.add_subcommand("dataset", "dataset operations");
  dataset->require_subcommand(1);
  CLI::App* build = dataset->add_subcommand("build", "label instances and write ASNT");
  add_common(build, ds_flags);
  build->add_option("--instances", ds_opts.n_records, "number of records");
  build->add_option("--first-instance", ds_opts.first_instance, "first instance id");
  build->add_option("--manifest-seed", ds_opts.manifest_seed, "split shuffle seed");
  build->add_option("--threads", ds_opts.threads, "worker threads")->check(CLI::PositiveNumber);
  build->add_option("--out", ds_out, "output .asnt path")->required();

  CommonFlags sw_flags;
  SweepOptions sw_opts;
  std::string sw_alphas;
  std::string sw_methods;
  std::string sw_out;
  CLI::App* sweep = app.add_subcommand("sweep", "solve a grid of alphas and instances");
  add_common(sweep, sw_flags);
  sweep->add_option("--alphas", sw_alphas, "comma-separated alpha values");
  sweep->add_option("--instances", sw_opts.n_instances, "instances per alpha")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--methods", sw_methods,
                    "comma-separated: milp,milp-aligned,channel-only,comm-only,sens-only");
  sweep->add_option("--threads", sw_opts.threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--gap", sw_opts.gap_tolerance, "MILP relative gap tolerance")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", sw_out, "output directory")->required();

  std::string rep_in;
  std::string rep_out;
  CLI::App* report = app.add_subcommand("report", "rebuild aggregates and plots");
  report->add_option("--in", rep_in, "instances.csv from a sweep")->required();
  report->add_option("--out", rep_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (show->parsed()) {
      std::cout << config_to_json(resolve_config(cfg_flags)) << "\n";
    } else if (gen->parsed()) {
      const ExperimentConfig cfg = resolve_config(gen_flags);
      json doc = json::array();
      for (int i = 0; i < gen_count; ++i)
        doc.push_back(instance_json(make_instance(cfg, gen_first + i)));
      emit(gen_out, doc);
    } else if (solve->parsed()) {
      const ExperimentConfig cfg = resolve_config(solve_flags);
      InstanceOptions io;
      io.alpha = solve_alpha;
      const Instance inst = make_instance(cfg, solve_id, io);
      const MilpEncoding enc = encode(inst.problem);
      if (!dump_lp.empty()) {
        std::ofstream out(dump_lp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dump_lp);
        write_sparse_rows(enc, out);
      }
      const AssociationSolution sol = branch_and_bound(enc, cfg.solver);
      json doc = solution_json(sol);
      doc["instance_id"] = solve_id;
      doc["alpha"] = inst.problem.alpha;
      emit(solve_out, doc);
      if (!sol.optimal)
        std::cerr << "warning: budget exhausted, certified gap " << sol.gap << "\n";
    } else if (base->parsed()) {
      const ExperimentConfig cfg = resolve_config(base_flags);
      const BaselinePolicy policy = parse_baseline(base_policy);
      InstanceOptions io;
      io.alpha = base_alpha;
      const Instance inst = make_instance(cfg, base_id, io);
      AssociationSolution reference;
      GreedyShortfall sf;
      if (policy == BaselinePolicy::kMilpAligned)
        reference = branch_and_bound(encode(inst.problem), cfg.solver);
      const AssociationSolution sol = greedy_solve(
          inst.problem, policy,
          policy == BaselinePolicy::kMilpAligned ? &reference : nullptr, &sf);
      json doc = solution_json(sol);
      doc["instance_id"] = base_id;
      doc["alpha"] = inst.problem.alpha;
      doc["baseline"] = std::string(to_string(policy));
      if (policy == BaselinePolicy::kMilpAligned) doc["shortfall"] = sf.any();
      emit(base_out, doc);
    } else if (build->parsed()) {
      const ExperimentConfig cfg = resolve_config(ds_flags);
      const DatasetManifest m = build_dataset(cfg, ds_opts, ds_out);
      std::cout << "wrote " << m.record_count << " records to " << ds_out << " (train "
                << m.count(Split::kTrain) << ", val " << m.count(Split::kVal) << ", test "
                << m.count(Split::kTest) << ")\n";
    } else if (sweep->parsed()) {
      const ExperimentConfig cfg = resolve_config(sw_flags);
      if (!sw_alphas.empty()) sw_opts.alphas = parse_alphas(sw_alphas);
      if (!sw_methods.empty()) {
        sw_opts.methods.clear();
        for (const std::string& m : split_list(sw_methods))
          sw_opts.methods.push_back(parse_method(m));
      }
      const EvalReport rep = run_sweep(cfg, sw_opts);
      emit_outputs(rep, sw_out);
      std::size_t budget_hits = 0;
      for (const InstanceResult& r : rep.rows)
        if (r.method == Method::kMilp && !r.optimal) ++budget_hits;
      std::cout << "wrote " << rep.rows.size() << " rows to " << sw_out;
      if (budget_hits > 0) std::cout << " (" << budget_hits << " MILP solves hit the budget)";
      std::cout << "\n";
    } else if (report->parsed()) {
      emit_outputs(load_report(rep_in), rep_out);
      std::cout << "wrote report to " << rep_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
