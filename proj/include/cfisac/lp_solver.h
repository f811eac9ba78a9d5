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
#include <span>
#include <vector>

#include "cfisac/milp_encoding.h"

namespace cfisac {

// A bounded-variable linear program: maximize c^T x subject to sparse rows
// a_i^T x <= b_i or >= b_i and lb <= x <= ub. All column bounds must be
// finite.
class LpModel {
 public:
  int add_column(double cost, double lb, double ub);
  void add_row(std::span<const int> cols, std::span<const double> coefs,
               RowSense sense, double rhs);

  int num_cols() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

 private:
  friend class DualSimplex;

  std::vector<double> cost_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  // Rows stored as "<=" (">=" rows are negated on insertion).
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> rhs_;
};

enum class LpStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kIterationLimit,
};

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 300;
  std::int64_t max_iterations = 200000;
  // Consecutive non-improving iterations before switching to Bland's rule.
  int stall_limit = 200;
};

struct LpResult {
  LpStatus status = LpStatus::kOptimal;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// Dual simplex on the bounded formulation with an explicit dense basis
// inverse. Every row gets a slack with finite bounds, so any basis can be
// made dual feasible by moving nonbasic columns to the bound matching the
// sign of their reduced cost; the first solve starts from the slack basis
// and later solves warm-start from the last optimal basis.
//
// Column bounds may be changed between solves, but only within the bounds
// the model was built with.
class DualSimplex {
 public:
  explicit DualSimplex(const LpModel& model, LpOptions options = {});

  void set_bounds(int col, double lb, double ub);
  double lower(int col) const { return lb_[col]; }
  double upper(int col) const { return ub_[col]; }

  // Throws NumericalError when the basis cannot be refactored.
  LpResult solve();

  // Structural column values of the last solve.
  std::span<const double> values() const { return {x_.data(), n_}; }
  int num_cols() const { return static_cast<int>(n_); }
  int num_rows() const { return static_cast<int>(m_); }

 private:
  bool is_basic(std::size_t j) const { return pos_[j] >= 0; }
  void refactor();
  void compute_primal();
  void compute_duals();
  bool restore_dual_feasibility();
  double primal_infeasibility(std::size_t position) const;
  void pivot_row_values(std::size_t r);
  void ftran_column(std::size_t q);

  LpOptions opt_;
  std::size_t n_ = 0;  // structural columns
  std::size_t m_ = 0;  // rows == slack columns
  // Structural columns, compressed.
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> rhs_;
  std::vector<double> cost_;  // minimization form, size n + m
  std::vector<double> model_lb_;
  std::vector<double> model_ub_;
  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<int> head_;  // position -> column
  std::vector<int> pos_;   // column -> position, -1 if nonbasic
  std::vector<double> binv_;  // m x m row-major
  std::vector<double> alpha_row_;
  std::vector<double> column_;
  bool initialized_ = false;
};

}  // namespace cfisac
