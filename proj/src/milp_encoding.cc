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

#include "cfisac/milp_encoding.h"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cfisac {
namespace {

// Offset of the unordered pair (u, v), u < v, among n items.
int pair_index(int u, int v, int n) {
  return u * n - u * (u + 1) / 2 + (v - u - 1);
}

}  // namespace

std::string_view to_string(RowFamily family) {
  switch (family) {
    case RowFamily::kUserNeedsTxMode: return "user_needs_tx_mode";
    case RowFamily::kIlluminationNeedsTxMode:
      return "illumination_needs_tx_mode";
    case RowFamily::kReceptionNeedsRxMode: return "reception_needs_rx_mode";
    case RowFamily::kRfChainLimit: return "rf_chain_limit";
    case RowFamily::kCorrelationConflict: return "correlation_conflict";
    case RowFamily::kTxReserve: return "tx_reserve";
    case RowFamily::kRxReserve: return "rx_reserve";
    case RowFamily::kTxMinimum: return "tx_minimum";
    case RowFamily::kRxMinimum: return "rx_minimum";
    case RowFamily::kTxCap: return "tx_cap";
    case RowFamily::kRxCap: return "rx_cap";
    case RowFamily::kRxCapacity: return "rx_capacity";
    case RowFamily::kUserPairProduct: return "user_pair_product";
    case RowFamily::kScheduledProduct: return "scheduled_product";
    case RowFamily::kTxRxProduct: return "txrx_product";
  }
  return "unknown";
}

bool is_linearization(RowFamily family) {
  return family == RowFamily::kUserPairProduct ||
         family == RowFamily::kScheduledProduct ||
         family == RowFamily::kTxRxProduct;
}

double MilpRow::activity(std::span<const double> values) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < vars.size(); ++i) sum += coefs[i] * values[vars[i]];
  return sum;
}

bool MilpRow::satisfied(std::span<const double> values, double tol) const {
  const double act = activity(values);
  return sense == RowSense::kLessEqual ? act <= rhs + tol : act >= rhs - tol;
}

int MilpEncoding::v(int a, int u, int q) const {
  if (u == q) throw std::invalid_argument("MilpEncoding::v: u == u'");
  if (u > q) std::swap(u, q);
  const int pairs = n_cu_ * (n_cu_ - 1) / 2;
  return v_off_ + a * pairs + pair_index(u, q, n_cu_);
}

int encoded_var_count(int n_ap, int n_cu, int n_tg) {
  return n_ap * n_cu + 2 * n_ap * n_tg + n_ap + n_tg + 2 * n_ap * n_ap * n_tg +
         n_ap * (n_cu * (n_cu - 1) / 2);
}

std::vector<double> MilpEncoding::assignment_of(
    const AssociationSolution& sol) const {
  std::vector<double> val(vars_.size(), 0.0);
  for (int a = 0; a < n_ap_; ++a) {
    val[tau(a)] = sol.tau[a];
    for (int u = 0; u < n_cu_; ++u) val[x(a, u)] = sol.x(a, u);
    for (int t = 0; t < n_tg_; ++t) {
      val[y_tx(a, t)] = sol.y_tx(a, t);
      val[y_rx(a, t)] = sol.y_rx(a, t);
    }
  }
  for (int t = 0; t < n_tg_; ++t) val[s(t)] = sol.s[t];
  for (int at = 0; at < n_ap_; ++at) {
    for (int t = 0; t < n_tg_; ++t) {
      for (int ar = 0; ar < n_ap_; ++ar) {
        const int wv = sol.y_tx(at, t) * sol.y_rx(ar, t);
        val[w(at, t, ar)] = wv;
        val[z(at, t, ar)] = wv * sol.s[t];
      }
    }
  }
  for (int a = 0; a < n_ap_; ++a)
    for (int u = 0; u < n_cu_; ++u)
      for (int q = u + 1; q < n_cu_; ++q)
        val[v(a, u, q)] = sol.x(a, u) * sol.x(a, q);
  return val;
}

AssociationSolution MilpEncoding::decisions_of(
    std::span<const double> values) const {
  auto bit = [&](int var) -> std::uint8_t { return values[var] > 0.5 ? 1 : 0; };
  AssociationSolution sol = AssociationSolution::zeros(n_ap_, n_cu_, n_tg_);
  for (int a = 0; a < n_ap_; ++a) {
    sol.tau[a] = bit(tau(a));
    for (int u = 0; u < n_cu_; ++u) sol.x(a, u) = bit(x(a, u));
    for (int t = 0; t < n_tg_; ++t) {
      sol.y_tx(a, t) = bit(y_tx(a, t));
      sol.y_rx(a, t) = bit(y_rx(a, t));
    }
  }
  for (int t = 0; t < n_tg_; ++t) sol.s[t] = bit(s(t));
  return sol;
}

double MilpEncoding::objective_value(std::span<const double> values) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < objective_.size(); ++i)
    sum += objective_[i] * values[i];
  return sum;
}

std::string MilpEncoding::var_name(int var) const {
  const MilpVar& mv = vars_.at(var);
  std::ostringstream os;
  switch (mv.kind) {
    case VarKind::kX: os << "x[" << mv.i << "," << mv.j << "]"; break;
    case VarKind::kYtx: os << "ytx[" << mv.i << "," << mv.j << "]"; break;
    case VarKind::kYrx: os << "yrx[" << mv.i << "," << mv.j << "]"; break;
    case VarKind::kTau: os << "tau[" << mv.i << "]"; break;
    case VarKind::kS: os << "s[" << mv.i << "]"; break;
    case VarKind::kW:
      os << "w[" << mv.i << "," << mv.j << "," << mv.k << "]";
      break;
    case VarKind::kZ:
      os << "z[" << mv.i << "," << mv.j << "," << mv.k << "]";
      break;
    case VarKind::kV:
      os << "v[" << mv.i << "," << mv.j << "," << mv.k << "]";
      break;
  }
  return os.str();
}

MilpEncoding encode(const AssociationProblem& problem) {
  problem.validate();
  MilpEncoding e;
  e.problem_ = problem;
  const int na = problem.n_ap();
  const int nc = problem.n_cu();
  const int nt = problem.n_tg();
  e.n_ap_ = na;
  e.n_cu_ = nc;
  e.n_tg_ = nt;
  e.x_off_ = 0;
  e.ytx_off_ = e.x_off_ + na * nc;
  e.yrx_off_ = e.ytx_off_ + na * nt;
  e.tau_off_ = e.yrx_off_ + na * nt;
  e.s_off_ = e.tau_off_ + na;
  e.w_off_ = e.s_off_ + nt;
  e.z_off_ = e.w_off_ + na * nt * na;
  e.v_off_ = e.z_off_ + na * nt * na;
  const int total = e.v_off_ + na * (nc * (nc - 1) / 2);

  e.vars_.resize(total);
  e.objective_.assign(total, 0.0);
  const double comm_scale = problem.alpha / problem.u_comm_ref;
  const double sens_scale = (1.0 - problem.alpha) / problem.u_sens_ref;

  for (int a = 0; a < na; ++a) {
    for (int u = 0; u < nc; ++u) {
      e.vars_[e.x(a, u)] = {VarKind::kX, a, u, 0};
      e.objective_[e.x(a, u)] =
          comm_scale * problem.lambda_cu[u] * problem.comm.gains(a, u);
    }
    for (int t = 0; t < nt; ++t) {
      e.vars_[e.y_tx(a, t)] = {VarKind::kYtx, a, t, 0};
      e.vars_[e.y_rx(a, t)] = {VarKind::kYrx, a, t, 0};
    }
    e.vars_[e.tau(a)] = {VarKind::kTau, a, 0, 0};
    e.objective_[e.tau(a)] = problem.mu[a];
  }
  for (int t = 0; t < nt; ++t) e.vars_[e.s(t)] = {VarKind::kS, t, 0, 0};
  for (int at = 0; at < na; ++at) {
    for (int t = 0; t < nt; ++t) {
      for (int ar = 0; ar < na; ++ar) {
        e.vars_[e.w(at, t, ar)] = {VarKind::kW, at, t, ar};
        e.vars_[e.z(at, t, ar)] = {VarKind::kZ, at, t, ar};
        e.objective_[e.z(at, t, ar)] =
            sens_scale * problem.lambda_tg[t] * problem.sens_gain(at, t, ar);
      }
    }
  }
  for (int a = 0; a < na; ++a) {
    for (int u = 0; u < nc; ++u) {
      for (int q = u + 1; q < nc; ++q) {
        const int idx = e.v(a, u, q);
        e.vars_[idx] = {VarKind::kV, a, u, q};
        const double g_u = problem.comm.gains(a, u);
        const double g_q = problem.comm.gains(a, q);
        e.objective_[idx] =
            -comm_scale * problem.nu *
            (problem.lambda_cu[u] * problem.comm.correlations[a](u, q) * g_u +
             problem.lambda_cu[q] * problem.comm.correlations[a](q, u) * g_q);
      }
    }
  }

  auto row = [&e](RowFamily family, RowSense sense, double rhs,
                  std::vector<std::pair<int, double>> terms) {
    MilpRow r;
    r.family = family;
    r.sense = sense;
    r.rhs = rhs;
    for (const auto& [var, coef] : terms) {
      r.vars.push_back(var);
      r.coefs.push_back(coef);
    }
    e.rows_.push_back(std::move(r));
  };
  using RS = RowSense;
  using RF = RowFamily;

  for (int a = 0; a < na; ++a) {
    for (int u = 0; u < nc; ++u)
      row(RF::kUserNeedsTxMode, RS::kLessEqual, 0.0,
          {{e.x(a, u), 1.0}, {e.tau(a), -1.0}});
    for (int t = 0; t < nt; ++t)
      row(RF::kIlluminationNeedsTxMode, RS::kLessEqual, 0.0,
          {{e.y_tx(a, t), 1.0}, {e.tau(a), -1.0}});
    for (int t = 0; t < nt; ++t)
      row(RF::kReceptionNeedsRxMode, RS::kLessEqual, 1.0,
          {{e.y_rx(a, t), 1.0}, {e.tau(a), 1.0}});
  }
  for (int a = 0; a < na; ++a) {
    std::vector<std::pair<int, double>> terms;
    for (int u = 0; u < nc; ++u) terms.push_back({e.x(a, u), 1.0});
    for (int t = 0; t < nt; ++t) terms.push_back({e.y_tx(a, t), 1.0});
    row(RF::kRfChainLimit, RS::kLessEqual, problem.n_rf[a], std::move(terms));
  }
  for (int a = 0; a < na; ++a) {
    for (int u = 0; u < nc; ++u) {
      for (int q = u + 1; q < nc; ++q) {
        const double rho = std::max(problem.comm.correlations[a](u, q),
                                    problem.comm.correlations[a](q, u));
        row(RF::kCorrelationConflict, RS::kLessEqual, 2.0 + problem.rho_th - rho,
            {{e.x(a, u), 1.0}, {e.x(a, q), 1.0}});
      }
    }
  }
  for (int t = 0; t < nt; ++t) {
    std::vector<std::pair<int, double>> tx, rx;
    for (int a = 0; a < na; ++a) {
      tx.push_back({e.y_tx(a, t), 1.0});
      rx.push_back({e.y_rx(a, t), 1.0});
    }
    auto with = [](std::vector<std::pair<int, double>> terms, int var,
                   double coef) {
      terms.push_back({var, coef});
      return terms;
    };
    row(RF::kTxReserve, RS::kLessEqual, 0.0, with(tx, e.s(t), -(na - 1.0)));
    row(RF::kRxReserve, RS::kLessEqual, 0.0, with(rx, e.s(t), -(na - 1.0)));
    row(RF::kTxMinimum, RS::kGreaterEqual, 0.0, with(tx, e.s(t), -1.0));
    row(RF::kRxMinimum, RS::kGreaterEqual, 0.0, with(rx, e.s(t), -1.0));
    row(RF::kTxCap, RS::kLessEqual, 0.0, with(tx, e.s(t), -problem.k_tx));
    row(RF::kRxCap, RS::kLessEqual, 0.0, with(rx, e.s(t), -problem.k_rx));
  }
  for (int a = 0; a < na; ++a) {
    std::vector<std::pair<int, double>> terms;
    for (int t = 0; t < nt; ++t) terms.push_back({e.y_rx(a, t), 1.0});
    row(RF::kRxCapacity, RS::kLessEqual, problem.c_rx[a], std::move(terms));
  }

  auto product = [&row](RowFamily family, int p, int f1, int f2) {
    row(family, RS::kLessEqual, 0.0, {{p, 1.0}, {f1, -1.0}});
    row(family, RS::kLessEqual, 0.0, {{p, 1.0}, {f2, -1.0}});
    row(family, RS::kGreaterEqual, -1.0, {{p, 1.0}, {f1, -1.0}, {f2, -1.0}});
  };
  for (int a = 0; a < na; ++a)
    for (int u = 0; u < nc; ++u)
      for (int q = u + 1; q < nc; ++q)
        product(RF::kUserPairProduct, e.v(a, u, q), e.x(a, u), e.x(a, q));
  for (int at = 0; at < na; ++at) {
    for (int t = 0; t < nt; ++t) {
      for (int ar = 0; ar < na; ++ar) {
        product(RF::kScheduledProduct, e.z(at, t, ar), e.s(t), e.w(at, t, ar));
        product(RF::kTxRxProduct, e.w(at, t, ar), e.y_tx(at, t),
                e.y_rx(ar, t));
      }
    }
  }
  return e;
}

void write_sparse_rows(const MilpEncoding& enc, std::ostream& out) {
  out << std::setprecision(17);
  out << "VARS " << enc.num_vars() << "\n";
  for (int i = 0; i < enc.num_vars(); ++i)
    out << i << " " << enc.var_name(i) << " " << enc.objective()[i] << "\n";
  out << "ROWS " << enc.rows().size() << "\n";
  for (std::size_t r = 0; r < enc.rows().size(); ++r) {
    const MilpRow& row = enc.rows()[r];
    out << r << " " << to_string(row.family) << " "
        << (row.sense == RowSense::kLessEqual ? "L" : "G") << " " << row.rhs
        << " " << row.vars.size();
    for (std::size_t i = 0; i < row.vars.size(); ++i)
      out << " " << row.vars[i] << ":" << row.coefs[i];
    out << "\n";
  }
}

}  // namespace cfisac
