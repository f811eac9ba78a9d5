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

#include "cfisac/pipeline.h"

#include <stdexcept>

#include "cfisac/rng.h"

namespace cfisac {

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t instance_id,
                       const InstanceOptions& options) {
  cfg.validate();
  Instance inst;
  inst.instance_id = instance_id;
  inst.scenario = generate_scenario(cfg.scenario, instance_id);
  if (options.alpha) {
    if (!(*options.alpha >= 0.0 && *options.alpha <= 1.0))
      throw std::invalid_argument("make_instance: alpha must be in [0, 1]");
    inst.scenario.alpha = *options.alpha;
  }
  if (options.unit_priorities) {
    std::fill(inst.scenario.lambda_cu.begin(), inst.scenario.lambda_cu.end(), 1.0);
    std::fill(inst.scenario.lambda_tg.begin(), inst.scenario.lambda_tg.end(), 1.0);
  }
  RngStream comm_rng = derive_stream(cfg.scenario.master_seed, instance_id, "comm");
  inst.comm = build_comm_stats(inst.scenario, cfg.scenario, cfg.comm, comm_rng);
  RngStream sens_rng = derive_stream(cfg.scenario.master_seed, instance_id, "sens");
  inst.sens = build_sens_stats(inst.scenario, cfg.scenario, cfg.sens, sens_rng);
  const std::vector<int> n_rf(cfg.scenario.n_ap, cfg.scenario.n_rf_per_ap);
  inst.problem = make_problem(inst.comm, inst.sens.gains, inst.scenario.lambda_cu,
                              inst.scenario.lambda_tg, inst.scenario.alpha,
                              cfg.problem, n_rf);
  return inst;
}

}  // namespace cfisac
