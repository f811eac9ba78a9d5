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

#include "cfisac/baselines.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace cfisac {
namespace {

bool conflicts(const AssociationProblem& p, int a, int u, int q) {
  const double rho =
      std::max(p.comm.correlations[a](u, q), p.comm.correlations[a](q, u));
  return 2.0 > 2.0 + p.rho_th - rho;
}

}  // namespace

std::string_view to_string(BaselinePolicy policy) {
  switch (policy) {
    case BaselinePolicy::kMilpAligned: return "milp-aligned";
    case BaselinePolicy::kChannelOnly: return "channel-only";
    case BaselinePolicy::kCommOnly: return "comm-only";
    case BaselinePolicy::kSensOnly: return "sens-only";
  }
  return "unknown";
}

BaselinePolicy parse_baseline(std::string_view name) {
  for (BaselinePolicy p : {BaselinePolicy::kMilpAligned, BaselinePolicy::kChannelOnly,
                           BaselinePolicy::kCommOnly, BaselinePolicy::kSensOnly}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown baseline: " + std::string(name));
}

AssociationSolution greedy_solve(const AssociationProblem& p,
                                 BaselinePolicy policy,
                                 const AssociationSolution* reference,
                                 GreedyShortfall* shortfall) {
  p.validate();
  const bool aligned = policy == BaselinePolicy::kMilpAligned;
  if (aligned && reference == nullptr)
    throw std::invalid_argument("greedy_solve: milp-aligned needs a reference");
  const bool raw = policy == BaselinePolicy::kChannelOnly;
  const int na = p.n_ap();
  const int nc = p.n_cu();
  const int nt = p.n_tg();

  GreedyShortfall counts;
  if (aligned) {
    for (std::uint8_t b : reference->x.data()) counts.users_wanted += b;
    for (std::uint8_t b : reference->s) counts.targets_wanted += b;
  }

  AssociationSolution sol = AssociationSolution::zeros(na, nc, nt);
  std::fill(sol.tau.begin(), sol.tau.end(), 1);
  std::vector<int> load(na, 0);
  std::vector<int> listening(na, 0);

  if (policy != BaselinePolicy::kCommOnly && na >= 2) {
    std::vector<std::pair<double, int>> order;
    for (int t = 0; t < nt; ++t) {
      double best = 0.0;
      for (int at = 0; at < na; ++at)
        for (int ar = 0; ar < na; ++ar)
          if (at != ar) best = std::max(best, p.sens_gain(at, t, ar));
      order.push_back({(raw ? 1.0 : p.lambda_tg[t]) * best, t});
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& l, const auto& r) { return l.first > r.first; });
    for (const auto& [score, t] : order) {
      if (aligned && counts.targets_scheduled >= counts.targets_wanted) break;
      int best_at = -1;
      int best_ar = -1;
      double best_gain = -1.0;
      for (int at = 0; at < na; ++at) {
        if (!sol.tau[at] || load[at] >= p.n_rf[at]) continue;
        for (int ar = 0; ar < na; ++ar) {
          if (ar == at || listening[ar] >= p.c_rx[ar]) continue;
          if (sol.tau[ar] && load[ar] > 0) continue;
          if (p.sens_gain(at, t, ar) > best_gain) {
            best_gain = p.sens_gain(at, t, ar);
            best_at = at;
            best_ar = ar;
          }
        }
      }
      if (best_at < 0) continue;
      sol.tau[best_ar] = 0;
      sol.s[t] = 1;
      sol.y_tx(best_at, t) = 1;
      sol.y_rx(best_ar, t) = 1;
      ++load[best_at];
      ++listening[best_ar];
      ++counts.targets_scheduled;
    }
  }

  if (policy != BaselinePolicy::kSensOnly) {
    std::vector<std::tuple<double, int, int>> order;
    for (int a = 0; a < na; ++a)
      for (int u = 0; u < nc; ++u)
        order.push_back({(raw ? 1.0 : p.lambda_cu[u]) * p.comm.gains(a, u), a, u});
    std::stable_sort(order.begin(), order.end(), [](const auto& l, const auto& r) {
      return std::get<0>(l) > std::get<0>(r);
    });
    for (const auto& [score, a, u] : order) {
      if (aligned && counts.users_assigned >= counts.users_wanted) break;
      if (!sol.tau[a] || load[a] >= p.n_rf[a]) continue;
      bool ok = true;
      for (int q = 0; q < nc && ok; ++q)
        if (q != u && sol.x(a, q) && conflicts(p, a, u, q)) ok = false;
      if (!ok) continue;
      sol.x(a, u) = 1;
      ++load[a];
      ++counts.users_assigned;
    }
  }

  sol.objective = total_objective(p, sol);
  sol.gap = 0.0;
  sol.optimal = false;
  if (shortfall != nullptr) *shortfall = counts;
  return sol;
}

}  // namespace cfisac
