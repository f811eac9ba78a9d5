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

#include "cfisac/lp_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "cfisac/grid.h"

namespace cfisac {

int LpModel::add_column(double cost, double lb, double ub) {
  if (!std::isfinite(lb) || !std::isfinite(ub) || lb > ub)
    throw std::invalid_argument("LpModel: column bounds must be finite, lb<=ub");
  cost_.push_back(cost);
  lb_.push_back(lb);
  ub_.push_back(ub);
  return static_cast<int>(cost_.size()) - 1;
}

void LpModel::add_row(std::span<const int> cols, std::span<const double> coefs,
                      RowSense sense, double rhs) {
  if (cols.size() != coefs.size())
    throw std::invalid_argument("LpModel: row size mismatch");
  const double sign = sense == RowSense::kLessEqual ? 1.0 : -1.0;
  std::vector<std::pair<int, double>> row;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] < 0 || cols[i] >= num_cols())
      throw std::invalid_argument("LpModel: row references unknown column");
    if (coefs[i] != 0.0) row.push_back({cols[i], sign * coefs[i]});
  }
  rows_.push_back(std::move(row));
  rhs_.push_back(sign * rhs);
}

DualSimplex::DualSimplex(const LpModel& model, LpOptions options)
    : opt_(options), n_(model.num_cols()), m_(model.num_rows()) {
  const std::size_t total = n_ + m_;
  std::vector<int> count(n_, 0);
  for (const auto& row : model.rows_)
    for (const auto& [col, val] : row) ++count[col];
  col_start_.assign(n_ + 1, 0);
  for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const auto& [col, val] : model.rows_[i]) {
      col_row_[fill[col]] = static_cast<int>(i);
      col_val_[fill[col]] = val;
      ++fill[col];
    }
  }

  rhs_ = model.rhs_;
  cost_.assign(total, 0.0);
  model_lb_.assign(total, 0.0);
  model_ub_.assign(total, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    cost_[j] = -model.cost_[j];
    model_lb_[j] = model.lb_[j];
    model_ub_[j] = model.ub_[j];
  }
  // Slack upper bounds from the smallest attainable row activity; they are
  // redundant for every x inside the model bounds.
  for (std::size_t i = 0; i < m_; ++i) {
    double min_activity = 0.0;
    for (const auto& [col, val] : model.rows_[i])
      min_activity += std::min(val * model.lb_[col], val * model.ub_[col]);
    model_ub_[n_ + i] = std::max(0.0, rhs_[i] - min_activity) + 1.0;
  }
  lb_ = model_lb_;
  ub_ = model_ub_;
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  head_.assign(m_, 0);
  pos_.assign(total, -1);
  binv_.assign(m_ * m_, 0.0);
  alpha_row_.assign(total, 0.0);
  column_.assign(m_, 0.0);
}

void DualSimplex::set_bounds(int col, double lb, double ub) {
  if (col < 0 || static_cast<std::size_t>(col) >= n_)
    throw std::out_of_range("DualSimplex::set_bounds: bad column");
  if (lb > ub || lb < model_lb_[col] - 1e-12 || ub > model_ub_[col] + 1e-12)
    throw std::invalid_argument(
        "DualSimplex::set_bounds: bounds must tighten the model bounds");
  lb_[col] = lb;
  ub_[col] = ub;
  if (!is_basic(col)) x_[col] = (d_[col] >= 0.0) ? lb : ub;
}

void DualSimplex::refactor() {
  // Basic structural columns and the rows whose slack is nonbasic form a
  // square block M; every basic slack contributes a unit column.
  std::vector<int> structural;
  std::vector<int> row_block(m_, -1);
  std::vector<int> block_rows;
  for (std::size_t p = 0; p < m_; ++p)
    if (static_cast<std::size_t>(head_[p]) < n_) structural.push_back(head_[p]);
  for (std::size_t i = 0; i < m_; ++i) {
    if (!is_basic(n_ + i)) {
      row_block[i] = static_cast<int>(block_rows.size());
      block_rows.push_back(static_cast<int>(i));
    }
  }
  const std::size_t k = structural.size();
  if (block_rows.size() != k)
    throw NumericalError("DualSimplex: inconsistent basis bookkeeping");

  Eigen::MatrixXd inv;
  if (k > 0) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t c = 0; c < k; ++c) {
      const int j = structural[c];
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
        if (row_block[col_row_[e]] >= 0) block(row_block[col_row_[e]], c) = col_val_[e];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
    if (!(lu.rcond() > 1e-14))
      throw NumericalError("DualSimplex: singular basis during refactor");
    inv = lu.inverse();
  }

  std::fill(binv_.begin(), binv_.end(), 0.0);
  std::vector<int> structural_rank(n_, -1);
  for (std::size_t c = 0; c < k; ++c) structural_rank[structural[c]] = static_cast<int>(c);
  for (std::size_t p = 0; p < m_; ++p) {
    const int j = head_[p];
    double* out = &binv_[p * m_];
    if (static_cast<std::size_t>(j) < n_) {
      const int c = structural_rank[j];
      for (std::size_t b = 0; b < k; ++b) out[block_rows[b]] = inv(c, b);
    } else {
      out[j - n_] = 1.0;
    }
  }
  // Basic slack rows: subtract A(i, structural) * inv.
  for (std::size_t c = 0; c < k; ++c) {
    const int j = structural[c];
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      const int i = col_row_[e];
      if (row_block[i] >= 0) continue;
      double* out = &binv_[static_cast<std::size_t>(pos_[n_ + i]) * m_];
      const double val = col_val_[e];
      for (std::size_t b = 0; b < k; ++b) out[block_rows[b]] -= val * inv(c, b);
    }
  }
}

void DualSimplex::compute_primal() {
  std::vector<double> r(rhs_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (is_basic(j) || x_[j] == 0.0) continue;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
      r[col_row_[e]] -= col_val_[e] * x_[j];
  }
  for (std::size_t i = 0; i < m_; ++i)
    if (!is_basic(n_ + i)) r[i] -= x_[n_ + i];
  for (std::size_t p = 0; p < m_; ++p) {
    const double* row = &binv_[p * m_];
    double sum = 0.0;
    for (std::size_t i = 0; i < m_; ++i) sum += row[i] * r[i];
    x_[head_[p]] = sum;
  }
}

void DualSimplex::compute_duals() {
  std::vector<double> y(m_, 0.0);
  for (std::size_t p = 0; p < m_; ++p) {
    const double c = cost_[head_[p]];
    if (c == 0.0) continue;
    const double* row = &binv_[p * m_];
    for (std::size_t i = 0; i < m_; ++i) y[i] += c * row[i];
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (is_basic(j)) {
      d_[j] = 0.0;
      continue;
    }
    double dot = 0.0;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
      dot += y[col_row_[e]] * col_val_[e];
    d_[j] = cost_[j] - dot;
  }
  for (std::size_t i = 0; i < m_; ++i)
    d_[n_ + i] = is_basic(n_ + i) ? 0.0 : -y[i];
}

bool DualSimplex::restore_dual_feasibility() {
  bool moved = false;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (is_basic(j)) continue;
    double target;
    if (lb_[j] == ub_[j]) {
      target = lb_[j];
    } else if (d_[j] > opt_.dual_tol) {
      target = lb_[j];
    } else if (d_[j] < -opt_.dual_tol) {
      target = ub_[j];
    } else {
      target = (x_[j] == ub_[j]) ? ub_[j] : lb_[j];
    }
    if (x_[j] != target) {
      x_[j] = target;
      moved = true;
    }
  }
  return moved;
}

double DualSimplex::primal_infeasibility(std::size_t p) const {
  const int j = head_[p];
  if (x_[j] < lb_[j] - opt_.primal_tol) return lb_[j] - x_[j];
  if (x_[j] > ub_[j] + opt_.primal_tol) return x_[j] - ub_[j];
  return 0.0;
}

void DualSimplex::pivot_row_values(std::size_t r) {
  const double* rho = &binv_[r * m_];
  for (std::size_t j = 0; j < n_; ++j) {
    if (is_basic(j)) continue;
    double dot = 0.0;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e)
      dot += rho[col_row_[e]] * col_val_[e];
    alpha_row_[j] = dot;
  }
  for (std::size_t i = 0; i < m_; ++i)
    if (!is_basic(n_ + i)) alpha_row_[n_ + i] = rho[i];
}

void DualSimplex::ftran_column(std::size_t q) {
  if (q < n_) {
    std::fill(column_.begin(), column_.end(), 0.0);
    for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) {
      const std::size_t i = col_row_[e];
      const double val = col_val_[e];
      for (std::size_t p = 0; p < m_; ++p) column_[p] += binv_[p * m_ + i] * val;
    }
  } else {
    const std::size_t i = q - n_;
    for (std::size_t p = 0; p < m_; ++p) column_[p] = binv_[p * m_ + i];
  }
}

LpResult DualSimplex::solve() {
  LpResult result;
  if (!initialized_) {
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = static_cast<int>(n_ + i);
      pos_[n_ + i] = static_cast<int>(i);
      binv_[i * m_ + i] = 1.0;
    }
    compute_duals();
    initialized_ = true;
  }
  restore_dual_feasibility();
  compute_primal();

  const std::size_t total = n_ + m_;
  int since_refactor = 0;
  int stall = 0;
  bool bland = false;
  bool just_refactored = false;
  double last_objective = -std::numeric_limits<double>::infinity();

  for (;;) {
    if (result.iterations >= opt_.max_iterations) {
      result.status = LpStatus::kIterationLimit;
      break;
    }
    if (since_refactor >= opt_.refactor_interval) {
      refactor();
      compute_duals();
      restore_dual_feasibility();
      compute_primal();
      since_refactor = 0;
      just_refactored = true;
    }

    // Leaving row.
    std::ptrdiff_t r = -1;
    double worst = 0.0;
    for (std::size_t p = 0; p < m_; ++p) {
      const double inf = primal_infeasibility(p);
      if (inf <= 0.0) continue;
      if (bland) {
        if (r < 0 || head_[p] < head_[r]) r = static_cast<std::ptrdiff_t>(p);
      } else if (inf > worst) {
        worst = inf;
        r = static_cast<std::ptrdiff_t>(p);
      }
    }
    if (r < 0) {
      result.status = LpStatus::kOptimal;
      break;
    }
    const std::size_t leave = static_cast<std::size_t>(head_[r]);
    const bool to_lower = x_[leave] < lb_[leave];
    const double sgn = to_lower ? -1.0 : 1.0;

    pivot_row_values(static_cast<std::size_t>(r));

    // Harris two-pass ratio test; Bland picks the smallest index instead.
    double theta_max = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < total; ++j) {
      if (is_basic(j) || lb_[j] == ub_[j]) continue;
      const double a = alpha_row_[j];
      if (std::abs(a) < opt_.pivot_tol) continue;
      const bool at_ub = x_[j] >= ub_[j];
      if (at_ub ? sgn * a >= 0.0 : sgn * a <= 0.0) continue;
      const double dd = at_ub ? std::max(-d_[j], 0.0) : std::max(d_[j], 0.0);
      const double tol = bland ? 0.0 : opt_.dual_tol;
      theta_max = std::min(theta_max, (dd + tol) / std::abs(a));
      any = true;
    }
    if (!any) {
      result.status = LpStatus::kInfeasible;
      break;
    }
    std::ptrdiff_t q = -1;
    double best_pivot = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
      if (is_basic(j) || lb_[j] == ub_[j]) continue;
      const double a = alpha_row_[j];
      if (std::abs(a) < opt_.pivot_tol) continue;
      const bool at_ub = x_[j] >= ub_[j];
      if (at_ub ? sgn * a >= 0.0 : sgn * a <= 0.0) continue;
      const double dd = at_ub ? std::max(-d_[j], 0.0) : std::max(d_[j], 0.0);
      if (dd / std::abs(a) > theta_max) continue;
      if (bland) {
        q = static_cast<std::ptrdiff_t>(j);
        break;
      }
      if (std::abs(a) > best_pivot) {
        best_pivot = std::abs(a);
        q = static_cast<std::ptrdiff_t>(j);
      }
    }
    const std::size_t enter = static_cast<std::size_t>(q);

    ftran_column(enter);
    const double alpha_q = alpha_row_[enter];
    if (std::abs(column_[r] - alpha_q) > 1e-7 * (1.0 + std::abs(alpha_q))) {
      if (just_refactored)
        throw NumericalError("DualSimplex: pivot element mismatch after refactor");
      since_refactor = opt_.refactor_interval;
      continue;
    }
    just_refactored = false;

    const double theta = d_[enter] / alpha_q;
    for (std::size_t j = 0; j < total; ++j)
      if (!is_basic(j)) d_[j] -= theta * alpha_row_[j];
    d_[leave] = -theta;
    d_[enter] = 0.0;

    const double bound = to_lower ? lb_[leave] : ub_[leave];
    const double delta = (x_[leave] - bound) / column_[r];
    for (std::size_t p = 0; p < m_; ++p)
      if (column_[p] != 0.0) x_[head_[p]] -= delta * column_[p];
    x_[enter] += delta;
    x_[leave] = bound;

    head_[r] = static_cast<int>(enter);
    pos_[enter] = static_cast<int>(r);
    pos_[leave] = -1;

    const double piv = column_[r];
    double* pivot_row = &binv_[static_cast<std::size_t>(r) * m_];
    for (std::size_t i = 0; i < m_; ++i) pivot_row[i] /= piv;
    for (std::size_t p = 0; p < m_; ++p) {
      if (p == static_cast<std::size_t>(r) || column_[p] == 0.0) continue;
      const double f = column_[p];
      double* row = &binv_[p * m_];
      for (std::size_t i = 0; i < m_; ++i) row[i] -= f * pivot_row[i];
    }

    ++result.iterations;
    ++since_refactor;

    double objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) objective += cost_[j] * x_[j];
    if (objective > last_objective + 1e-12) {
      last_objective = objective;
      stall = 0;
    } else if (++stall > opt_.stall_limit) {
      bland = true;
    }
  }

  double objective = 0.0;
  for (std::size_t j = 0; j < n_; ++j) objective -= cost_[j] * x_[j];
  result.objective = objective;
  return result;
}

}  // namespace cfisac
