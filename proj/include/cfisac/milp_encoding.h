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
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfisac/association.h"

namespace cfisac {

enum class VarKind : std::uint8_t { kX, kYtx, kYrx, kTau, kS, kW, kZ, kV };

// Index triple of one encoded variable: x (a,u), y_tx / y_rx (a,t), tau (a),
// s (t), w / z (a_t, t, a_r), v (a, u, u') with u < u'.
struct MilpVar {
  VarKind kind;
  int i = 0;
  int j = 0;
  int k = 0;
};

enum class RowSense : std::uint8_t { kLessEqual, kGreaterEqual };

enum class RowFamily : std::uint8_t {
  kUserNeedsTxMode,
  kIlluminationNeedsTxMode,
  kReceptionNeedsRxMode,
  kRfChainLimit,
  kCorrelationConflict,
  kTxReserve,
  kRxReserve,
  kTxMinimum,
  kRxMinimum,
  kTxCap,
  kRxCap,
  kRxCapacity,
  kUserPairProduct,   // v = x(a,u) x(a,u')
  kScheduledProduct,  // z = s w
  kTxRxProduct,       // w = y_tx y_rx
};

std::string_view to_string(RowFamily family);
bool is_linearization(RowFamily family);

struct MilpRow {
  std::vector<int> vars;
  std::vector<double> coefs;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  RowFamily family = RowFamily::kUserNeedsTxMode;

  double activity(std::span<const double> values) const;
  bool satisfied(std::span<const double> values, double tol = 1e-9) const;
};

// The 0-1 program with every bilinear product replaced by an auxiliary
// binary and its three linking rows. Variables are laid out in blocks
// x, y_tx, y_rx, tau, s, w, z, v; v exists for unordered user pairs only,
// with the two penalty orientations folded into one coefficient.
class MilpEncoding {
 public:
  const AssociationProblem& problem() const { return problem_; }
  const std::vector<MilpVar>& vars() const { return vars_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<MilpRow>& rows() const { return rows_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }

  int x(int a, int u) const { return x_off_ + a * n_cu_ + u; }
  int y_tx(int a, int t) const { return ytx_off_ + a * n_tg_ + t; }
  int y_rx(int a, int t) const { return yrx_off_ + a * n_tg_ + t; }
  int tau(int a) const { return tau_off_ + a; }
  int s(int t) const { return s_off_ + t; }
  int w(int at, int t, int ar) const {
    return w_off_ + (at * n_tg_ + t) * n_ap_ + ar;
  }
  int z(int at, int t, int ar) const {
    return z_off_ + (at * n_tg_ + t) * n_ap_ + ar;
  }
  // Requires u != v; order does not matter.
  int v(int a, int u, int q) const;

  // Decision variables (x, y_tx, y_rx, tau, s) occupy [0, num_decision_vars).
  int num_decision_vars() const { return w_off_; }
  bool is_decision(int var) const { return var < w_off_; }

  // Full 0/1 assignment of a solution with auxiliaries set to the products.
  std::vector<double> assignment_of(const AssociationSolution& sol) const;
  // Decisions rounded from (near-)integral values; objective is not filled.
  AssociationSolution decisions_of(std::span<const double> values) const;
  double objective_value(std::span<const double> values) const;
  std::string var_name(int var) const;

 private:
  friend MilpEncoding encode(const AssociationProblem& problem);

  AssociationProblem problem_;
  std::vector<MilpVar> vars_;
  std::vector<double> objective_;
  std::vector<MilpRow> rows_;
  int n_ap_ = 0;
  int n_cu_ = 0;
  int n_tg_ = 0;
  int x_off_ = 0;
  int ytx_off_ = 0;
  int yrx_off_ = 0;
  int tau_off_ = 0;
  int s_off_ = 0;
  int w_off_ = 0;
  int z_off_ = 0;
  int v_off_ = 0;
};

MilpEncoding encode(const AssociationProblem& problem);

// Expected variable count for the given sizes.
int encoded_var_count(int n_ap, int n_cu, int n_tg);

// Sparse row text dump, one line per variable and per row:
//   VARS <n>
//   <index> <name> <objective coefficient>
//   ROWS <m>
//   <index> <family> <L|G> <rhs> <nnz> <var>:<coef> ...
void write_sparse_rows(const MilpEncoding& encoding, std::ostream& out);

}  // namespace cfisac
