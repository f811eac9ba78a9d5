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

#include "cfisac/association.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cfisac {
namespace {

double pair_correlation(const AssociationProblem& p, int a, int u, int v) {
  return std::max(p.comm.correlations[a](u, v), p.comm.correlations[a](v, u));
}

double sum_top_k(std::vector<double> values, int k) {
  k = std::min<int>(k, static_cast<int>(values.size()));
  std::partial_sort(values.begin(), values.begin() + k, values.end(),
                    std::greater<>());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += values[i];
  return sum;
}

bool is_binary(std::uint8_t v) { return v == 0 || v == 1; }

}  // namespace

void AssociationProblem::validate() const {
  const int na = n_ap();
  const int nc = n_cu();
  const int nt = n_tg();
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid association problem: " + what);
  };
  if (comm.gains.rows() != na || comm.gains.cols() != nc)
    fail("comm gain shape");
  if (static_cast<int>(comm.correlations.size()) != na) fail("correlation count");
  for (const auto& c : comm.correlations)
    if (c.rows() != nc || c.cols() != nc) fail("correlation shape");
  if (static_cast<int>(sens_gain.dim0()) != na ||
      static_cast<int>(sens_gain.dim1()) != nt ||
      static_cast<int>(sens_gain.dim2()) != na)
    fail("sensing gain shape");
  if (static_cast<int>(c_rx.size()) != na || static_cast<int>(mu.size()) != na)
    fail("per-AP vector size");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha outside [0,1]");
  if (!(nu >= 0.0)) fail("nu must be >= 0");
  if (!(u_comm_ref > 0.0) || !(u_sens_ref > 0.0)) fail("references must be > 0");
  if (k_tx < 1 || k_rx < 1) fail("k_tx and k_rx must be >= 1");
  for (int c : c_rx)
    if (c < 1) fail("c_rx must be >= 1");
  for (int r : n_rf)
    if (r < 0) fail("n_rf must be >= 0");
}

AssociationSolution AssociationSolution::zeros(int n_ap, int n_cu, int n_tg) {
  AssociationSolution s;
  s.tau.assign(n_ap, 0);
  s.x = BinaryGrid(n_ap, n_cu);
  s.s.assign(n_tg, 0);
  s.y_tx = BinaryGrid(n_ap, n_tg);
  s.y_rx = BinaryGrid(n_ap, n_tg);
  return s;
}

std::vector<std::uint8_t> AssociationSolution::canonical_bits() const {
  std::vector<std::uint8_t> bits;
  bits.reserve(tau.size() + s.size() + x.size() + y_tx.size() + y_rx.size());
  bits.insert(bits.end(), tau.begin(), tau.end());
  bits.insert(bits.end(), s.begin(), s.end());
  bits.insert(bits.end(), x.data().begin(), x.data().end());
  bits.insert(bits.end(), y_tx.data().begin(), y_tx.data().end());
  bits.insert(bits.end(), y_rx.data().begin(), y_rx.data().end());
  return bits;
}

bool AssociationSolution::same_decisions(const AssociationSolution& o) const {
  return tau == o.tau && x == o.x && s == o.s && y_tx == o.y_tx &&
         y_rx == o.y_rx;
}

Eigen::VectorXd mode_reward(const CommStats& comm,
                            const std::vector<double>& lambda_cu) {
  if (comm.gains.size() == 0 || !(comm.gains.maxCoeff() > 0.0))
    throw std::invalid_argument("mode_reward: all channel gains are zero");
  if (static_cast<int>(lambda_cu.size()) != comm.n_cu())
    throw std::invalid_argument("mode_reward: lambda size mismatch");
  const double g_max = comm.gains.maxCoeff();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(comm.n_ap());
  for (int a = 0; a < comm.n_ap(); ++a)
    for (int u = 0; u < comm.n_cu(); ++u)
      mu(a) += lambda_cu[u] * (comm.gains(a, u) / g_max);
  return mu;
}

double comm_utility(const AssociationProblem& p, const BinaryGrid& x) {
  double total = 0.0;
  for (int u = 0; u < p.n_cu(); ++u) {
    for (int a = 0; a < p.n_ap(); ++a) {
      if (!x(a, u)) continue;
      const double g = p.comm.gains(a, u);
      double penalty = 0.0;
      for (int v = 0; v < p.n_cu(); ++v) {
        if (v == u || !x(a, v)) continue;
        penalty += p.comm.correlations[a](u, v) * g;
      }
      total += p.lambda_cu[u] * (g - p.nu * penalty);
    }
  }
  return total;
}

double sens_utility(const AssociationProblem& p, const BinaryVector& s,
                    const BinaryGrid& y_tx, const BinaryGrid& y_rx) {
  double total = 0.0;
  for (int t = 0; t < p.n_tg(); ++t) {
    if (!s[t]) continue;
    double sum = 0.0;
    for (int ar = 0; ar < p.n_ap(); ++ar) {
      if (!y_rx(ar, t)) continue;
      for (int at = 0; at < p.n_ap(); ++at) {
        if (y_tx(at, t)) sum += p.sens_gain(at, t, ar);
      }
    }
    total += p.lambda_tg[t] * sum;
  }
  return total;
}

NormalizationRefs normalization_refs(const AssociationProblem& p) {
  NormalizationRefs refs;
  for (int a = 0; a < p.n_ap(); ++a) {
    std::vector<double> weighted(p.n_cu());
    for (int u = 0; u < p.n_cu(); ++u)
      weighted[u] = p.lambda_cu[u] * p.comm.gains(a, u);
    refs.u_comm_ref += sum_top_k(std::move(weighted), p.n_rf[a]);
  }
  for (int t = 0; t < p.n_tg(); ++t) {
    std::vector<double> off_diag;
    for (int at = 0; at < p.n_ap(); ++at)
      for (int ar = 0; ar < p.n_ap(); ++ar)
        if (at != ar) off_diag.push_back(p.sens_gain(at, t, ar));
    refs.u_sens_ref +=
        p.lambda_tg[t] * sum_top_k(std::move(off_diag), p.k_tx * p.k_rx);
  }
  refs.u_comm_ref = std::max(refs.u_comm_ref, kRefFloor);
  refs.u_sens_ref = std::max(refs.u_sens_ref, kRefFloor);
  return refs;
}

AssociationProblem make_problem(CommStats comm, Grid3<double> sens_gain,
                                std::vector<double> lambda_cu,
                                std::vector<double> lambda_tg, double alpha,
                                const ProblemParams& params,
                                const std::vector<int>& n_rf) {
  AssociationProblem p;
  p.comm = std::move(comm);
  p.sens_gain = std::move(sens_gain);
  p.lambda_cu = std::move(lambda_cu);
  p.lambda_tg = std::move(lambda_tg);
  p.alpha = alpha;
  p.nu = params.nu;
  p.rho_th = params.rho_th;
  p.k_tx = params.k_tx;
  p.k_rx = params.k_rx;
  p.n_rf = n_rf;
  p.c_rx = params.c_rx.empty() ? n_rf : params.c_rx;
  if (p.comm.gains.size() > 0 && p.comm.gains.maxCoeff() > 0.0) {
    const Eigen::VectorXd mu = mode_reward(p.comm, p.lambda_cu);
    p.mu.assign(mu.data(), mu.data() + mu.size());
  } else {
    p.mu.assign(p.n_ap(), 0.0);
  }
  const NormalizationRefs refs = normalization_refs(p);
  p.u_comm_ref = refs.u_comm_ref;
  p.u_sens_ref = refs.u_sens_ref;
  p.validate();
  return p;
}

std::string_view to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kShape: return "shape";
    case ConstraintFamily::kUserNeedsTxMode: return "user_needs_tx_mode";
    case ConstraintFamily::kIlluminationNeedsTxMode:
      return "illumination_needs_tx_mode";
    case ConstraintFamily::kReceptionNeedsRxMode:
      return "reception_needs_rx_mode";
    case ConstraintFamily::kRfChainLimit: return "rf_chain_limit";
    case ConstraintFamily::kCorrelationConflict: return "correlation_conflict";
    case ConstraintFamily::kTxReserve: return "tx_reserve";
    case ConstraintFamily::kRxReserve: return "rx_reserve";
    case ConstraintFamily::kTxMinimum: return "tx_minimum";
    case ConstraintFamily::kRxMinimum: return "rx_minimum";
    case ConstraintFamily::kTxCap: return "tx_cap";
    case ConstraintFamily::kRxCap: return "rx_cap";
    case ConstraintFamily::kRxCapacity: return "rx_capacity";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << to_string(family) << "(";
  for (std::size_t i = 0; i < indices.size(); ++i)
    os << (i ? "," : "") << indices[i];
  os << ")";
  return os.str();
}

FeasibilityReport verify_feasible(const AssociationProblem& p,
                                  const AssociationSolution& sol) {
  FeasibilityReport rep;
  auto add = [&rep](ConstraintFamily f, std::vector<int> idx) {
    rep.feasible = false;
    rep.violations.push_back({f, std::move(idx)});
  };
  const int na = p.n_ap();
  const int nc = p.n_cu();
  const int nt = p.n_tg();
  if (static_cast<int>(sol.tau.size()) != na ||
      static_cast<int>(sol.s.size()) != nt ||
      static_cast<int>(sol.x.rows()) != na ||
      static_cast<int>(sol.x.cols()) != nc ||
      static_cast<int>(sol.y_tx.rows()) != na ||
      static_cast<int>(sol.y_tx.cols()) != nt ||
      static_cast<int>(sol.y_rx.rows()) != na ||
      static_cast<int>(sol.y_rx.cols()) != nt) {
    add(ConstraintFamily::kShape, {});
    return rep;
  }
  for (std::uint8_t b : sol.canonical_bits()) {
    if (!is_binary(b)) {
      add(ConstraintFamily::kShape, {});
      return rep;
    }
  }

  for (int a = 0; a < na; ++a) {
    int load = 0;
    int listening = 0;
    for (int u = 0; u < nc; ++u) {
      if (sol.x(a, u) > sol.tau[a])
        add(ConstraintFamily::kUserNeedsTxMode, {a, u});
      load += sol.x(a, u);
    }
    for (int t = 0; t < nt; ++t) {
      if (sol.y_tx(a, t) > sol.tau[a])
        add(ConstraintFamily::kIlluminationNeedsTxMode, {a, t});
      if (sol.y_rx(a, t) > 1 - sol.tau[a])
        add(ConstraintFamily::kReceptionNeedsRxMode, {a, t});
      load += sol.y_tx(a, t);
      listening += sol.y_rx(a, t);
    }
    if (load > p.n_rf[a]) add(ConstraintFamily::kRfChainLimit, {a});
    for (int u = 0; u < nc; ++u) {
      for (int v = u + 1; v < nc; ++v) {
        const double rhs = 2.0 + p.rho_th - pair_correlation(p, a, u, v);
        if (sol.x(a, u) + sol.x(a, v) > rhs)
          add(ConstraintFamily::kCorrelationConflict, {a, u, v});
      }
    }
    if (listening > p.c_rx[a]) add(ConstraintFamily::kRxCapacity, {a});
  }

  for (int t = 0; t < nt; ++t) {
    int n_tx = 0;
    int n_rx = 0;
    for (int a = 0; a < na; ++a) {
      n_tx += sol.y_tx(a, t);
      n_rx += sol.y_rx(a, t);
    }
    const int st = sol.s[t];
    if (n_tx > (na - 1) * st) add(ConstraintFamily::kTxReserve, {t});
    if (n_rx > (na - 1) * st) add(ConstraintFamily::kRxReserve, {t});
    if (n_tx < st) add(ConstraintFamily::kTxMinimum, {t});
    if (n_rx < st) add(ConstraintFamily::kRxMinimum, {t});
    if (n_tx > p.k_tx * st) add(ConstraintFamily::kTxCap, {t});
    if (n_rx > p.k_rx * st) add(ConstraintFamily::kRxCap, {t});
  }
  return rep;
}

double objective_unchecked(const AssociationProblem& p,
                           const AssociationSolution& sol) {
  double value = p.alpha * comm_utility(p, sol.x) / p.u_comm_ref +
                 (1.0 - p.alpha) * sens_utility(p, sol.s, sol.y_tx, sol.y_rx) /
                     p.u_sens_ref;
  for (int a = 0; a < p.n_ap(); ++a) value += p.mu[a] * sol.tau[a];
  return value;
}

double total_objective(const AssociationProblem& p,
                       const AssociationSolution& sol) {
  const FeasibilityReport rep = verify_feasible(p, sol);
  if (!rep.feasible) {
    throw std::invalid_argument("total_objective: infeasible solution, " +
                                rep.violations.front().describe());
  }
  return objective_unchecked(p, sol);
}

}  // namespace cfisac
