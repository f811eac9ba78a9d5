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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cfisac/config.h"
#include "cfisac/dataset.h"

namespace cfisac {

enum class Method : std::uint8_t {
  kMilp,
  kMilpAligned,
  kChannelOnly,
  kCommOnly,
  kSensOnly,
};

std::string_view to_string(Method method);
// "milp" or one of the baseline names.
Method parse_method(std::string_view name);

// Per-solution metrics. Fractions follow these definitions: UE coverage is
// the share of users served by at least one AP, target fraction is
// sum(s) / n_tg, Tx-AP fraction is sum(tau) / n_ap and the comm RF-share is
// sum(x) / (sum(x) + sum(y_tx)), 0 when nothing is assigned.
struct SolutionMetrics {
  double utility = 0.0;
  double u_comm = 0.0;  // unnormalized
  double u_sens = 0.0;  // unnormalized
  double ue_coverage = 0.0;
  double target_fraction = 0.0;
  double tx_ap_fraction = 0.0;
  double comm_rf_share = 0.0;
};

SolutionMetrics solution_metrics(const AssociationProblem& problem,
                                 const AssociationSolution& solution);

struct InstanceResult {
  double alpha = 0.0;
  std::uint64_t instance_id = 0;
  Method method = Method::kMilp;
  SolutionMetrics metrics;
  bool optimal = false;
  double gap = 0.0;
  double wall_time_s = 0.0;
  bool shortfall = false;
};

struct Aggregate {
  double alpha = 0.0;
  Method method = Method::kMilp;
  std::string metric;
  std::size_t n = 0;
  double mean = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
};

// Names of the aggregated metrics, in output order.
const std::vector<std::string>& metric_names();
double metric_value(const SolutionMetrics& m, std::string_view name);

// Linear-interpolation quantile of unsorted samples; q in [0, 1].
double quantile(std::vector<double> samples, double q);

struct EvalReport {
  std::vector<double> alphas;
  std::vector<Method> methods;
  // Ordered by (alpha, instance_id, method) in the order of the two lists.
  std::vector<InstanceResult> rows;

  std::vector<Aggregate> aggregates() const;
  // Sorted utilities of one method pooled over all alphas.
  std::vector<double> cdf_samples(Method method) const;
};

struct SweepOptions {
  std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
  int n_instances = 200;
  std::uint64_t first_instance = 0;
  std::vector<Method> methods = {Method::kMilp, Method::kMilpAligned,
                                 Method::kChannelOnly, Method::kCommOnly,
                                 Method::kSensOnly};
  int threads = 1;
  // Priority weights set to one, as in the published sweep.
  bool unit_priorities = true;
  // Baseline solutions are passed to the MILP as starting incumbents.
  bool seed_milp = true;
  // Replaces the configured solver gap; the tie polish is skipped since
  // only objective values are reported.
  double gap_tolerance = 1e-6;
};

// Solves every (alpha, instance) with every method. The same instance id
// shares its geometry and channel statistics across alphas. A MILP that
// runs out of budget is recorded with its certified gap.
EvalReport run_sweep(const ExperimentConfig& cfg, const SweepOptions& options);

// Writes instances.csv, aggregates.csv, cdf.csv, cdf.svg and
// metrics_vs_alpha.svg into out_dir (created if missing).
void emit_outputs(const EvalReport& report, const std::string& out_dir);

// Reads an instances.csv written by emit_outputs.
EvalReport load_report(const std::string& instances_csv);

struct DatasetBuildOptions {
  std::size_t n_records = 1000;
  std::uint64_t first_instance = 0;
  std::uint64_t manifest_seed = 0;
  int threads = 1;
};

// Generates instances, labels them with the exact solver (the configured
// solver settings) and writes the ASNT container.
DatasetManifest build_dataset(const ExperimentConfig& cfg,
                              const DatasetBuildOptions& options,
                              const std::string& path);

// Runs fn(i) for i in [0, n) on `threads` workers. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cfisac
