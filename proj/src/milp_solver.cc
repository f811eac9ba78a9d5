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

#include "cfisac/milp_solver.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace cfisac {
namespace {

using Clock = std::chrono::steady_clock;
using Fixings = std::vector<std::pair<int, std::uint8_t>>;

constexpr double kIntegralityTol = 1e-7;
constexpr double kNumericSlack = 1e-11;

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

// Full relaxation: every encoded variable in [0, 1], every encoded row.
LpModel build_full_model(const MilpEncoding& enc) {
  LpModel m;
  for (int i = 0; i < enc.num_vars(); ++i) m.add_column(enc.objective()[i], 0.0, 1.0);
  for (const MilpRow& row : enc.rows()) m.add_row(row.vars, row.coefs, row.sense, row.rhs);
  return m;
}

// Projected relaxation. Decisions keep their encoding indices. Each product
// variable is kept only when its coefficient can make its linking rows bind:
// z with a positive coefficient needs only its upper rows, v with a negative
// coefficient only its lower row. Diagonal z vanish for every feasible point
// (one AP cannot be in both modes) and w is eliminated through z. Conflict
// rows are rounded to x + x' <= 1 or dropped when vacuous, and y <= s is
// added, which every integer point satisfies through the reserve rows.
LpModel build_reduced_model(const MilpEncoding& enc) {
  const AssociationProblem& p = enc.problem();
  const int na = p.n_ap();
  const int nc = p.n_cu();
  const int nt = p.n_tg();
  LpModel m;
  for (int i = 0; i < enc.num_decision_vars(); ++i)
    m.add_column(enc.objective()[i], 0.0, 1.0);
  for (const MilpRow& row : enc.rows()) {
    if (is_linearization(row.family)) continue;
    if (row.family == RowFamily::kCorrelationConflict) {
      if (!(2.0 > row.rhs)) continue;
      m.add_row(row.vars, row.coefs, RowSense::kLessEqual, 1.0);
      continue;
    }
    m.add_row(row.vars, row.coefs, row.sense, row.rhs);
  }
  auto add2 = [&m](int a, double ca, int b, double cb, RowSense sense, double rhs) {
    const int cols[] = {a, b};
    const double coefs[] = {ca, cb};
    m.add_row(cols, coefs, sense, rhs);
  };
  for (int a = 0; a < na; ++a) {
    for (int t = 0; t < nt; ++t) {
      add2(enc.y_tx(a, t), 1.0, enc.s(t), -1.0, RowSense::kLessEqual, 0.0);
      add2(enc.y_rx(a, t), 1.0, enc.s(t), -1.0, RowSense::kLessEqual, 0.0);
    }
  }
  for (int at = 0; at < na; ++at) {
    for (int t = 0; t < nt; ++t) {
      for (int ar = 0; ar < na; ++ar) {
        const double c = enc.objective()[enc.z(at, t, ar)];
        if (at == ar || c <= 0.0) continue;
        const int col = m.add_column(c, 0.0, 1.0);
        add2(col, 1.0, enc.y_tx(at, t), -1.0, RowSense::kLessEqual, 0.0);
        add2(col, 1.0, enc.y_rx(ar, t), -1.0, RowSense::kLessEqual, 0.0);
      }
    }
  }
  for (int a = 0; a < na; ++a) {
    for (int u = 0; u < nc; ++u) {
      for (int q = u + 1; q < nc; ++q) {
        const double c = enc.objective()[enc.v(a, u, q)];
        if (c >= 0.0) continue;
        const int col = m.add_column(c, 0.0, 1.0);
        const int cols[] = {col, enc.x(a, u), enc.x(a, q)};
        const double coefs[] = {1.0, -1.0, -1.0};
        m.add_row(cols, coefs, RowSense::kGreaterEqual, -1.0);
      }
    }
  }
  return m;
}

// Decision columns in canonical bit order: tau, s, x, y_tx, y_rx.
std::vector<int> canonical_columns(const MilpEncoding& enc) {
  const AssociationProblem& p = enc.problem();
  std::vector<int> cols;
  for (int a = 0; a < p.n_ap(); ++a) cols.push_back(enc.tau(a));
  for (int t = 0; t < p.n_tg(); ++t) cols.push_back(enc.s(t));
  for (int a = 0; a < p.n_ap(); ++a)
    for (int u = 0; u < p.n_cu(); ++u) cols.push_back(enc.x(a, u));
  for (int a = 0; a < p.n_ap(); ++a)
    for (int t = 0; t < p.n_tg(); ++t) cols.push_back(enc.y_tx(a, t));
  for (int a = 0; a < p.n_ap(); ++a)
    for (int t = 0; t < p.n_tg(); ++t) cols.push_back(enc.y_rx(a, t));
  return cols;
}

struct Node {
  double bound = 0.0;
  std::int64_t id = 0;
  int depth = 0;
  int branch_var = -1;  // variable fixed last, for pseudo-costs
  double branch_delta = 0.0;
  Fixings fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class Engine {
 public:
  Engine(const MilpEncoding& enc, const SolverConfig& cfg, Clock::time_point deadline)
      : enc_(enc),
        cfg_(cfg),
        deadline_(deadline),
        n_dec_(enc.num_decision_vars()),
        lp_(cfg.reduced_relaxation ? build_reduced_model(enc) : build_full_model(enc)),
        applied_(n_dec_, -1),
        pc_sum_(2 * n_dec_, 0.0),
        pc_count_(2 * n_dec_, 0) {
    const AssociationProblem& p = enc.problem();
    priority_.assign(n_dec_, false);
    for (int a = 0; a < p.n_ap(); ++a) priority_[enc.tau(a)] = true;
    for (int t = 0; t < p.n_tg(); ++t) priority_[enc.s(t)] = true;
  }

  struct Outcome {
    bool found = false;
    AssociationSolution best;
    double best_obj = -std::numeric_limits<double>::infinity();
    bool exhausted = false;
    double open_bound = -std::numeric_limits<double>::infinity();
  };

  // Optimization when cutoff is empty; otherwise stops at the first integer
  // point whose objective reaches *cutoff.
  Outcome run(const Fixings& base, std::optional<double> cutoff,
              const AssociationSolution* incumbent, double incumbent_obj) {
    Outcome out;
    if (incumbent != nullptr) {
      out.found = true;
      out.best = *incumbent;
      out.best_obj = incumbent_obj;
    }
    double tol_pruned = -std::numeric_limits<double>::infinity();
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::int64_t next_id = 0;
    open.push({std::numeric_limits<double>::infinity(), next_id++, 0, -1, 0.0, base});

    auto prune_level = [&]() {
      if (cutoff) return *cutoff - kNumericSlack * scale_of(*cutoff);
      if (!out.found) return -std::numeric_limits<double>::infinity();
      return out.best_obj +
             std::max(cfg_.gap_tolerance, kNumericSlack) * scale_of(out.best_obj);
    };
    auto prunable = [&](double bound) {
      return cutoff ? bound < prune_level() : bound <= prune_level();
    };

    std::optional<Node> current;
    for (;;) {
      if (!current) {
        while (!open.empty() && prunable(open.top().bound)) {
          if (!cutoff && out.found && open.top().bound > out.best_obj)
            tol_pruned = std::max(tol_pruned, open.top().bound);
          open.pop();
        }
        if (open.empty()) {
          out.exhausted = true;
          break;
        }
        current = open.top();
        open.pop();
      }
      if (nodes_ >= cfg_.node_limit || Clock::now() >= deadline_) {
        open.push(std::move(*current));
        current.reset();
        break;
      }
      Node node = std::move(*current);
      current.reset();
      if (prunable(node.bound)) {
        if (!cutoff && out.found && node.bound > out.best_obj)
          tol_pruned = std::max(tol_pruned, node.bound);
        continue;
      }

      const LpResult res = evaluate(node.fixings);
      ++nodes_;
      lp_iterations_ += res.iterations;
      if (res.status == LpStatus::kInfeasible) continue;
      if (res.status == LpStatus::kIterationLimit) {
        std::ostringstream os;
        os << "branch_and_bound: LP iteration limit at node depth " << node.depth
           << " with " << node.fixings.size() << " fixings";
        throw NumericalError(os.str());
      }
      const double bound = std::min(res.objective, node.bound);
      if (node.branch_var >= 0 && std::isfinite(node.bound)) {
        const int slot = 2 * node.branch_var + (node.branch_delta > 0 ? 1 : 0);
        pc_sum_[slot] += std::max(0.0, node.bound - res.objective) /
                         std::max(std::abs(node.branch_delta), 1e-6);
        ++pc_count_[slot];
      }
      if (prunable(bound)) {
        if (!cutoff && out.found && bound > out.best_obj)
          tol_pruned = std::max(tol_pruned, bound);
        continue;
      }

      const std::span<const double> values = lp_.values();
      int var = select_branch(values);
      if (var < 0) {
        AssociationSolution cand = enc_.decisions_of(values);
        if (verify_feasible(enc_.problem(), cand).feasible) {
          const double obj = objective_unchecked(enc_.problem(), cand);
          if (cutoff) {
            if (obj >= *cutoff) {
              out.found = true;
              out.best = std::move(cand);
              out.best_obj = obj;
              break;
            }
          } else if (!out.found || obj > out.best_obj) {
            out.found = true;
            out.best = std::move(cand);
            out.best_obj = obj;
          }
          if (std::abs(obj - bound) <= 1e-9 * scale_of(bound)) continue;
        }
        var = most_fractional(values, 0.0);
        if (var < 0) continue;
      }

      const double v = values[var];
      const std::uint8_t first = v >= 0.5 ? 1 : 0;
      Node children[2];
      for (int k = 0; k < 2; ++k) {
        const std::uint8_t val = k == 0 ? first : static_cast<std::uint8_t>(1 - first);
        Node& child = children[k];
        child.bound = bound;
        child.id = next_id++;
        child.depth = node.depth + 1;
        child.branch_var = var;
        child.branch_delta = val - v;
        child.fixings = node.fixings;
        child.fixings.push_back({var, val});
      }
      if (cfg_.search == SearchOrder::kDepthFirstDive) {
        open.push(std::move(children[1]));
        current = std::move(children[0]);
      } else {
        open.push(std::move(children[0]));
        open.push(std::move(children[1]));
      }
    }

    if (!out.exhausted) {
      double b = tol_pruned;
      if (!open.empty()) b = std::max(b, open.top().bound);
      out.open_bound = b;
    } else {
      out.open_bound = tol_pruned;
    }
    return out;
  }

  std::int64_t nodes() const { return nodes_; }
  std::int64_t lp_iterations() const { return lp_iterations_; }
  bool out_of_budget() const {
    return nodes_ >= cfg_.node_limit || Clock::now() >= deadline_;
  }

 private:
  LpResult evaluate(const Fixings& fixings) {
    std::vector<std::int8_t> want(n_dec_, -1);
    for (const auto& [var, val] : fixings) want[var] = static_cast<std::int8_t>(val);
    for (int j = 0; j < n_dec_; ++j) {
      if (want[j] == applied_[j]) continue;
      if (want[j] < 0) {
        lp_.set_bounds(j, 0.0, 1.0);
      } else {
        lp_.set_bounds(j, want[j], want[j]);
      }
      applied_[j] = want[j];
    }
    return lp_.solve();
  }

  int most_fractional(std::span<const double> values, double min_frac) const {
    int best = -1;
    double best_frac = min_frac;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
      for (int j = 0; j < n_dec_; ++j) {
        if (priority_[j] != (pass == 0)) continue;
        const double f = std::min(values[j], 1.0 - values[j]);
        if (f > best_frac) {
          best_frac = f;
          best = j;
        }
      }
    }
    return best;
  }

  double pseudo_cost(int var, int up) const {
    const int slot = 2 * var + up;
    if (pc_count_[slot] > 0) return pc_sum_[slot] / pc_count_[slot];
    double sum = 0.0;
    std::int64_t count = 0;
    for (int j = 0; j < n_dec_; ++j) {
      if (pc_count_[2 * j + up] == 0) continue;
      sum += pc_sum_[2 * j + up] / pc_count_[2 * j + up];
      ++count;
    }
    return count > 0 ? sum / count : 1.0;
  }

  int select_branch(std::span<const double> values) const {
    if (cfg_.branching_rule == BranchingRule::kMostFractional)
      return most_fractional(values, kIntegralityTol);
    int best = -1;
    double best_score = -1.0;
    for (int pass = 0; pass < 2 && best < 0; ++pass) {
      for (int j = 0; j < n_dec_; ++j) {
        if (priority_[j] != (pass == 0)) continue;
        const double f = values[j];
        if (std::min(f, 1.0 - f) <= kIntegralityTol) continue;
        const double down = std::max(pseudo_cost(j, 0) * f, 1e-9);
        const double up = std::max(pseudo_cost(j, 1) * (1.0 - f), 1e-9);
        const double score = down * up;
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      }
    }
    return best;
  }

  const MilpEncoding& enc_;
  const SolverConfig& cfg_;
  Clock::time_point deadline_;
  int n_dec_;
  DualSimplex lp_;
  std::vector<std::int8_t> applied_;
  std::vector<bool> priority_;
  std::vector<double> pc_sum_;
  std::vector<std::int64_t> pc_count_;
  std::int64_t nodes_ = 0;
  std::int64_t lp_iterations_ = 0;
};

}  // namespace

void SolverConfig::validate() const {
  if (!(gap_tolerance >= 0.0))
    throw std::invalid_argument("SolverConfig: gap_tolerance must be >= 0");
  if (!(time_budget_s > 0.0))
    throw std::invalid_argument("SolverConfig: time_budget_s must be > 0");
  if (node_limit < 1) throw std::invalid_argument("SolverConfig: node_limit must be >= 1");
}

LpRelaxation lp_relax_solve(const MilpEncoding& encoding,
                            std::span<const VarFixing> fixed) {
  DualSimplex lp(build_full_model(encoding));
  for (const VarFixing& f : fixed) {
    if (f.var < 0 || f.var >= encoding.num_vars())
      throw std::out_of_range("lp_relax_solve: fixed variable out of range");
    lp.set_bounds(f.var, f.value, f.value);
  }
  const LpResult res = lp.solve();
  if (res.status == LpStatus::kIterationLimit)
    throw NumericalError("lp_relax_solve: iteration limit reached");
  LpRelaxation out;
  out.status = res.status;
  out.value = res.objective;
  out.iterations = res.iterations;
  out.point.assign(lp.values().begin(), lp.values().end());
  return out;
}

AssociationSolution branch_and_bound(const MilpEncoding& encoding,
                                     const SolverConfig& config,
                                     std::span<const AssociationSolution> seeds) {
  config.validate();
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(config.time_budget_s));
  const AssociationProblem& problem = encoding.problem();

  AssociationSolution incumbent =
      AssociationSolution::zeros(problem.n_ap(), problem.n_cu(), problem.n_tg());
  double incumbent_obj = 0.0;
  for (const AssociationSolution& seed : seeds) {
    if (!verify_feasible(problem, seed).feasible) continue;
    const double obj = objective_unchecked(problem, seed);
    if (obj > incumbent_obj) {
      incumbent = seed;
      incumbent_obj = obj;
    }
  }

  Engine engine(encoding, config, deadline);
  Engine::Outcome out = engine.run({}, std::nullopt, &incumbent, incumbent_obj);

  AssociationSolution result = out.best;
  const double opt = out.best_obj;
  double gap = std::max(0.0, out.open_bound - opt) / scale_of(opt);
  if (out.exhausted && gap <= 1e-9) gap = 0.0;
  result.optimal = out.exhausted || gap <= config.gap_tolerance;

  if (config.tie_polish && out.exhausted && config.gap_tolerance == 0.0) {
    const double cutoff = opt - tie_slack(opt);
    Fixings fixes;
    AssociationSolution witness = result;
    for (int col : canonical_columns(encoding)) {
      const std::vector<double> vals = encoding.assignment_of(witness);
      if (vals[col] < 0.5) {
        fixes.push_back({col, 0});
        continue;
      }
      Fixings trial = fixes;
      trial.push_back({col, 0});
      Engine::Outcome sub = engine.run(trial, cutoff, nullptr, 0.0);
      if (sub.found) {
        witness = std::move(sub.best);
        fixes.push_back({col, 0});
      } else if (sub.exhausted) {
        fixes.push_back({col, 1});
      } else {
        break;
      }
    }
    const bool optimal = result.optimal;
    result = std::move(witness);
    result.optimal = optimal;
  }

  result.objective = objective_unchecked(problem, result);
  result.gap = gap;
  result.stats.nodes = engine.nodes();
  result.stats.lp_iterations = engine.lp_iterations();
  result.stats.wall_time_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

namespace {

struct BruteForceSpace {
  // Conflict-free user masks within the RF budget, per AP.
  std::vector<std::vector<std::uint32_t>> user_masks;
};

BruteForceSpace make_space(const AssociationProblem& p) {
  BruteForceSpace sp;
  const int nc = p.n_cu();
  if (nc > 24) throw std::length_error("brute_force_solve: too many users");
  sp.user_masks.resize(p.n_ap());
  for (int a = 0; a < p.n_ap(); ++a) {
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << nc); ++mask) {
      if (std::popcount(mask) > p.n_rf[a]) continue;
      bool ok = true;
      for (int u = 0; u < nc && ok; ++u) {
        if (!(mask >> u & 1)) continue;
        for (int q = u + 1; q < nc && ok; ++q) {
          if (!(mask >> q & 1)) continue;
          const double rho = std::max(p.comm.correlations[a](u, q),
                                      p.comm.correlations[a](q, u));
          if (2.0 > 2.0 + p.rho_th - rho) ok = false;
        }
      }
      if (ok) sp.user_masks[a].push_back(mask);
    }
  }
  return sp;
}

// Per-target (tx set, rx set) options for a mode pattern; option 0 leaves
// the target unscheduled.
std::vector<std::pair<std::uint32_t, std::uint32_t>> target_options(
    const AssociationProblem& p, std::uint32_t tx_aps) {
  const int na = p.n_ap();
  const std::uint32_t all = (std::uint32_t{1} << na) - 1;
  const std::uint32_t rx_aps = all & ~tx_aps;
  const int max_tx = std::min(p.k_tx, na - 1);
  const int max_rx = std::min(p.k_rx, na - 1);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> opts{{0, 0}};
  for (std::uint32_t t = tx_aps; t != 0; t = (t - 1) & tx_aps) {
    if (std::popcount(t) > max_tx) continue;
    for (std::uint32_t r = rx_aps; r != 0; r = (r - 1) & rx_aps) {
      if (std::popcount(r) > max_rx) continue;
      opts.push_back({t, r});
    }
  }
  std::sort(opts.begin() + 1, opts.end());
  return opts;
}

}  // namespace

std::uint64_t brute_force_leaf_count(const AssociationProblem& p) {
  p.validate();
  const int na = p.n_ap();
  if (na > 20) return std::numeric_limits<std::uint64_t>::max();
  const BruteForceSpace sp = make_space(p);
  double total = 0.0;
  for (std::uint32_t tau = 0; tau < (std::uint32_t{1} << na); ++tau) {
    double leaves = 1.0;
    for (int a = 0; a < na; ++a)
      if (tau >> a & 1) leaves *= static_cast<double>(sp.user_masks[a].size());
    const double opts = static_cast<double>(target_options(p, tau).size());
    leaves *= std::pow(opts, p.n_tg());
    total += leaves;
  }
  if (total >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(total);
}

AssociationSolution brute_force_solve(const AssociationProblem& p,
                                      std::uint64_t leaf_cap) {
  const std::uint64_t leaves = brute_force_leaf_count(p);
  if (leaves > leaf_cap) {
    std::ostringstream os;
    os << "brute_force_solve: " << leaves << " leaves exceed the cap of " << leaf_cap;
    throw std::length_error(os.str());
  }
  const auto start = Clock::now();
  const int na = p.n_ap();
  const int nc = p.n_cu();
  const int nt = p.n_tg();
  const BruteForceSpace sp = make_space(p);
  AssociationSolution sol = AssociationSolution::zeros(na, nc, nt);
  std::vector<int> tx_load(na, 0);
  std::vector<int> rx_load(na, 0);
  std::int64_t visited = 0;

  auto enumerate = [&](const std::function<void(const AssociationSolution&)>& visit) {
    for (std::uint32_t tau = 0; tau < (std::uint32_t{1} << na); ++tau) {
      for (int a = 0; a < na; ++a) sol.tau[a] = tau >> a & 1;
      const auto opts = target_options(p, tau);
      std::function<void(int)> users = [&](int a) {
        if (a == na) {
          ++visited;
          visit(sol);
          return;
        }
        if (!sol.tau[a]) {
          users(a + 1);
          return;
        }
        for (std::uint32_t mask : sp.user_masks[a]) {
          if (std::popcount(mask) + tx_load[a] > p.n_rf[a]) continue;
          for (int u = 0; u < nc; ++u) sol.x(a, u) = mask >> u & 1;
          users(a + 1);
        }
        for (int u = 0; u < nc; ++u) sol.x(a, u) = 0;
      };
      std::function<void(int)> targets = [&](int t) {
        if (t == nt) {
          users(0);
          return;
        }
        for (const auto& [txs, rxs] : opts) {
          bool ok = true;
          for (int a = 0; a < na; ++a) {
            const int tx = txs >> a & 1;
            const int rx = rxs >> a & 1;
            tx_load[a] += tx;
            rx_load[a] += rx;
            sol.y_tx(a, t) = static_cast<std::uint8_t>(tx);
            sol.y_rx(a, t) = static_cast<std::uint8_t>(rx);
            if (tx_load[a] > p.n_rf[a] || rx_load[a] > p.c_rx[a]) ok = false;
          }
          sol.s[t] = txs != 0 ? 1 : 0;
          if (ok) targets(t + 1);
          for (int a = 0; a < na; ++a) {
            tx_load[a] -= txs >> a & 1;
            rx_load[a] -= rxs >> a & 1;
            sol.y_tx(a, t) = 0;
            sol.y_rx(a, t) = 0;
          }
          sol.s[t] = 0;
        }
      };
      targets(0);
    }
  };

  double best = -std::numeric_limits<double>::infinity();
  enumerate([&](const AssociationSolution& cand) {
    const double obj = objective_unchecked(p, cand);
    if (obj > best && verify_feasible(p, cand).feasible) best = obj;
  });
  const double threshold = best - tie_slack(best);
  AssociationSolution winner;
  std::vector<std::uint8_t> winner_bits;
  bool have = false;
  enumerate([&](const AssociationSolution& cand) {
    const double obj = objective_unchecked(p, cand);
    if (obj < threshold) return;
    std::vector<std::uint8_t> bits = cand.canonical_bits();
    if (have && !(bits < winner_bits)) return;
    if (!verify_feasible(p, cand).feasible) return;
    winner = cand;
    winner_bits = std::move(bits);
    have = true;
  });
  winner.objective = objective_unchecked(p, winner);
  winner.gap = 0.0;
  winner.optimal = true;
  winner.stats.nodes = visited;
  winner.stats.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return winner;
}

}  // namespace cfisac
