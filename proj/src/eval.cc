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

#include "cfisac/eval.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cfisac/baselines.h"
#include "cfisac/milp_encoding.h"
#include "cfisac/milp_solver.h"
#include "cfisac/pipeline.h"
#include "cfisac/plot_svg.h"

namespace cfisac {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const char* kInstanceHeader =
    "alpha,instance_id,method,utility,u_comm,u_sens,ue_coverage,target_fraction,"
    "tx_ap_fraction,comm_rf_share,optimal,gap,wall_time_s,shortfall";

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kMilp: return "milp";
    case Method::kMilpAligned: return "milp-aligned";
    case Method::kChannelOnly: return "channel-only";
    case Method::kCommOnly: return "comm-only";
    case Method::kSensOnly: return "sens-only";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kMilp, Method::kMilpAligned, Method::kChannelOnly,
                   Method::kCommOnly, Method::kSensOnly}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

SolutionMetrics solution_metrics(const AssociationProblem& p,
                                 const AssociationSolution& sol) {
  SolutionMetrics m;
  m.utility = total_objective(p, sol);
  m.u_comm = comm_utility(p, sol.x);
  m.u_sens = sens_utility(p, sol.s, sol.y_tx, sol.y_rx);
  int covered = 0;
  int n_x = 0;
  for (int u = 0; u < p.n_cu(); ++u) {
    int served = 0;
    for (int a = 0; a < p.n_ap(); ++a) served += sol.x(a, u);
    covered += served > 0;
    n_x += served;
  }
  int n_s = 0;
  for (std::uint8_t b : sol.s) n_s += b;
  int n_tau = 0;
  for (std::uint8_t b : sol.tau) n_tau += b;
  int n_ytx = 0;
  for (std::uint8_t b : sol.y_tx.data()) n_ytx += b;
  m.ue_coverage = p.n_cu() > 0 ? static_cast<double>(covered) / p.n_cu() : 0.0;
  m.target_fraction = p.n_tg() > 0 ? static_cast<double>(n_s) / p.n_tg() : 0.0;
  m.tx_ap_fraction = p.n_ap() > 0 ? static_cast<double>(n_tau) / p.n_ap() : 0.0;
  m.comm_rf_share = n_x + n_ytx > 0 ? static_cast<double>(n_x) / (n_x + n_ytx) : 0.0;
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "utility", "ue_coverage", "target_fraction", "tx_ap_fraction", "comm_rf_share"};
  return names;
}

double metric_value(const SolutionMetrics& m, std::string_view name) {
  if (name == "utility") return m.utility;
  if (name == "ue_coverage") return m.ue_coverage;
  if (name == "target_fraction") return m.target_fraction;
  if (name == "tx_ap_fraction") return m.tx_ap_fraction;
  if (name == "comm_rf_share") return m.comm_rf_share;
  if (name == "u_comm") return m.u_comm;
  if (name == "u_sens") return m.u_sens;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile: no samples");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

std::vector<Aggregate> EvalReport::aggregates() const {
  std::vector<Aggregate> out;
  for (double alpha : alphas) {
    for (Method method : methods) {
      for (const std::string& name : metric_names()) {
        std::vector<double> v;
        for (const InstanceResult& r : rows)
          if (r.alpha == alpha && r.method == method)
            v.push_back(metric_value(r.metrics, name));
        if (v.empty()) continue;
        Aggregate agg;
        agg.alpha = alpha;
        agg.method = method;
        agg.metric = name;
        agg.n = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        agg.mean = sum / static_cast<double>(v.size());
        agg.p25 = quantile(v, 0.25);
        agg.median = quantile(v, 0.5);
        agg.p75 = quantile(v, 0.75);
        out.push_back(agg);
      }
    }
  }
  return out;
}

std::vector<double> EvalReport::cdf_samples(Method method) const {
  std::vector<double> v;
  for (const InstanceResult& r : rows)
    if (r.method == method) v.push_back(r.metrics.utility);
  std::sort(v.begin(), v.end());
  return v;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    for (;;) {
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (error) return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

EvalReport run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
  cfg.validate();
  if (options.n_instances < 0) throw std::invalid_argument("run_sweep: negative instance count");
  for (double a : options.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("run_sweep: alpha outside [0, 1]");
  EvalReport report;
  report.alphas = options.alphas;
  report.methods = options.methods;
  const bool want_milp =
      std::find(options.methods.begin(), options.methods.end(), Method::kMilp) !=
          options.methods.end() ||
      std::find(options.methods.begin(), options.methods.end(), Method::kMilpAligned) !=
          options.methods.end();

  SolverConfig solver = cfg.solver;
  solver.gap_tolerance = options.gap_tolerance;
  solver.tie_polish = false;
  const std::size_t n_inst = static_cast<std::size_t>(options.n_instances);
  const std::size_t jobs = options.alphas.size() * n_inst;
  std::vector<std::vector<InstanceResult>> results(jobs);
  parallel_for(jobs, options.threads, [&](std::size_t job) {
    const double alpha = options.alphas[job / n_inst];
    const std::uint64_t id = options.first_instance + job % n_inst;
    InstanceOptions io;
    io.alpha = alpha;
    io.unit_priorities = options.unit_priorities;
    const Instance inst = make_instance(cfg, id, io);
    const AssociationProblem& p = inst.problem;

    std::map<Method, AssociationSolution> sols;
    std::map<Method, bool> shortfall;
    std::vector<AssociationSolution> seeds;
    for (Method m : options.methods) {
      if (m == Method::kMilp || m == Method::kMilpAligned) continue;
      BaselinePolicy policy = m == Method::kChannelOnly ? BaselinePolicy::kChannelOnly
                              : m == Method::kCommOnly  ? BaselinePolicy::kCommOnly
                                                        : BaselinePolicy::kSensOnly;
      sols[m] = greedy_solve(p, policy);
      shortfall[m] = false;
      seeds.push_back(sols[m]);
    }
    if (want_milp) {
      const MilpEncoding enc = encode(p);
      sols[Method::kMilp] = branch_and_bound(
          enc, solver,
          options.seed_milp ? std::span<const AssociationSolution>(seeds)
                            : std::span<const AssociationSolution>());
      shortfall[Method::kMilp] = false;
      GreedyShortfall sf;
      AssociationSolution aligned =
          greedy_solve(p, BaselinePolicy::kMilpAligned, &sols[Method::kMilp], &sf);
      sols[Method::kMilpAligned] = std::move(aligned);
      shortfall[Method::kMilpAligned] = sf.any();
    }
    for (Method m : options.methods) {
      const AssociationSolution& sol = sols.at(m);
      InstanceResult r;
      r.alpha = alpha;
      r.instance_id = id;
      r.method = m;
      r.metrics = solution_metrics(p, sol);
      r.optimal = sol.optimal;
      r.gap = sol.gap;
      r.wall_time_s = sol.stats.wall_time_s;
      r.shortfall = shortfall.at(m);
      results[job].push_back(r);
    }
  });
  for (auto& block : results)
    for (InstanceResult& r : block) report.rows.push_back(r);
  return report;
}

void emit_outputs(const EvalReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::ostringstream inst;
  inst << kInstanceHeader << "\n";
  for (const InstanceResult& r : report.rows) {
    const SolutionMetrics& m = r.metrics;
    inst << fmt(r.alpha) << "," << r.instance_id << "," << to_string(r.method) << ","
         << fmt(m.utility) << "," << fmt(m.u_comm) << "," << fmt(m.u_sens) << ","
         << fmt(m.ue_coverage) << "," << fmt(m.target_fraction) << ","
         << fmt(m.tx_ap_fraction) << "," << fmt(m.comm_rf_share) << ","
         << (r.optimal ? 1 : 0) << "," << fmt(r.gap) << "," << fmt(r.wall_time_s) << ","
         << (r.shortfall ? 1 : 0) << "\n";
  }
  write_file(dir / "instances.csv", inst.str());

  const std::vector<Aggregate> aggs = report.aggregates();
  std::ostringstream agg;
  agg << "alpha,method,metric,n,mean,p25,median,p75\n";
  for (const Aggregate& a : aggs) {
    agg << fmt(a.alpha) << "," << to_string(a.method) << "," << a.metric << "," << a.n
        << "," << fmt(a.mean) << "," << fmt(a.p25) << "," << fmt(a.median) << ","
        << fmt(a.p75) << "\n";
  }
  write_file(dir / "aggregates.csv", agg.str());

  std::ostringstream cdf;
  cdf << "method,utility,cumulative_fraction\n";
  std::vector<PlotSeries> cdf_series;
  for (Method m : report.methods) {
    const std::vector<double> v = report.cdf_samples(m);
    PlotSeries s;
    s.label = std::string(to_string(m));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double frac = static_cast<double>(i + 1) / static_cast<double>(v.size());
      cdf << to_string(m) << "," << fmt(v[i]) << "," << fmt(frac) << "\n";
      s.x.push_back(v[i]);
      s.y.push_back(frac);
    }
    cdf_series.push_back(std::move(s));
  }
  write_file(dir / "cdf.csv", cdf.str());
  PlotSpec cdf_spec{"Empirical CDF of the utility", "utility", "CDF", true};
  write_file(dir / "cdf.svg",
             svg_document(640, 420, svg_panel(cdf_spec, cdf_series, 0, 0, 640, 420)));

  const std::vector<std::string> panels = {"ue_coverage", "target_fraction",
                                           "tx_ap_fraction", "comm_rf_share"};
  std::string body;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    std::vector<PlotSeries> series;
    for (Method m : report.methods) {
      PlotSeries s;
      s.label = std::string(to_string(m));
      for (const Aggregate& a : aggs) {
        if (a.method != m || a.metric != panels[k]) continue;
        s.x.push_back(a.alpha);
        s.y.push_back(a.median);
        s.lo.push_back(a.p25);
        s.hi.push_back(a.p75);
      }
      series.push_back(std::move(s));
    }
    PlotSpec spec{panels[k] + " (median, IQR)", "alpha", panels[k], false};
    body += svg_panel(spec, series, (k % 2) * 640.0, (k / 2) * 420.0, 640, 420);
  }
  write_file(dir / "metrics_vs_alpha.svg", svg_document(1280, 840, body));
}

EvalReport load_report(const std::string& instances_csv) {
  std::ifstream in(instances_csv);
  if (!in) throw std::runtime_error("cannot open " + instances_csv);
  std::string line;
  if (!std::getline(in, line) || line != kInstanceHeader)
    throw std::invalid_argument("load_report: unexpected header in " + instances_csv);
  EvalReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> c = split_csv(line);
    if (c.size() != 14)
      throw std::invalid_argument("load_report: bad row at line " + std::to_string(line_no));
    InstanceResult r;
    try {
      r.alpha = std::stod(c[0]);
      r.instance_id = std::stoull(c[1]);
      r.method = parse_method(c[2]);
      r.metrics.utility = std::stod(c[3]);
      r.metrics.u_comm = std::stod(c[4]);
      r.metrics.u_sens = std::stod(c[5]);
      r.metrics.ue_coverage = std::stod(c[6]);
      r.metrics.target_fraction = std::stod(c[7]);
      r.metrics.tx_ap_fraction = std::stod(c[8]);
      r.metrics.comm_rf_share = std::stod(c[9]);
      r.optimal = c[10] == "1";
      r.gap = std::stod(c[11]);
      r.wall_time_s = std::stod(c[12]);
      r.shortfall = c[13] == "1";
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("load_report: bad value at line " +
                                  std::to_string(line_no) + ": " + e.what());
    }
    if (std::find(report.alphas.begin(), report.alphas.end(), r.alpha) == report.alphas.end())
      report.alphas.push_back(r.alpha);
    if (std::find(report.methods.begin(), report.methods.end(), r.method) ==
        report.methods.end())
      report.methods.push_back(r.method);
    report.rows.push_back(r);
  }
  return report;
}

DatasetManifest build_dataset(const ExperimentConfig& cfg,
                              const DatasetBuildOptions& options,
                              const std::string& path) {
  cfg.validate();
  std::vector<DatasetRecord> records(options.n_records);
  parallel_for(options.n_records, options.threads, [&](std::size_t i) {
    const std::uint64_t id = options.first_instance + i;
    const Instance inst = make_instance(cfg, id);
    const AssociationSolution sol = branch_and_bound(encode(inst.problem), cfg.solver);
    records[i] = make_record(inst.problem, sol, id);
  });
  std::ostringstream meta;
  meta << "{\"config\": " << config_to_json(cfg) << "}";
  return write_records(path, records, options.manifest_seed, config_hash(cfg), meta.str());
}

}  // namespace cfisac
