// Copyright 2026 The matchaudit Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchaudit/rational.hpp"

namespace matchaudit {

// Exact linear programming over rationals. Problems are stated as
//   maximize c^T x  subject to  A x {<=,=,>=} b,  x >= 0,
// and solved by a two-phase dense primal simplex with Bland's rule, so every
// run is deterministic and terminates. All arithmetic is exact; optimal
// solutions are re-substituted into the original program before being
// returned, so a reported optimum is always a verified feasible point.

enum class ConstraintSense { LessEq, Equal, GreaterEq };

struct LinearConstraint {
  std::vector<Rational> coeffs;  // one per variable
  ConstraintSense sense = ConstraintSense::LessEq;
  Rational rhs;
};

struct LinearProgram {
  int num_vars = 0;
  std::vector<Rational> objective;  // maximized; one coefficient per variable
  std::vector<LinearConstraint> constraints;
};

struct LpStats {
  std::size_t solves = 0;
  std::size_t pivots = 0;
  std::size_t verified_optima = 0;  // optima re-checked against the input
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Rational value;                    // objective at the optimum
  std::vector<Rational> assignment;  // optimal x (Optimal only)
};

namespace lp_internal {

// One simplex pass with Bland's rule over an m x (cols+1) tableau whose last
// column is the rhs. `cost[j]` holds z_j - c_j for the current basis; the
// pass pivots until no cost entry is negative (optimal) or an improving
// column has no positive row entry (unbounded). Columns with blocked[j] set
// never enter the basis.
inline bool bland_pass(std::vector<std::vector<Rational>>& tab,
                       std::vector<Rational>& cost, Rational& objective,
                       std::vector<int>& basis,
                       const std::vector<bool>& blocked, std::size_t& pivots) {
  const int rows = static_cast<int>(tab.size());
  const int cols = static_cast<int>(cost.size());
  for (;;) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (!blocked[j] && cost[j].sign() < 0) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;  // optimal
    int leave = -1;
    Rational best_ratio;
    for (int i = 0; i < rows; ++i) {
      if (tab[i][enter].sign() <= 0) continue;
      Rational ratio = tab[i][cols] / tab[i][enter];
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return false;  // unbounded direction
    ++pivots;
    // Normalize the pivot row, then eliminate the pivot column everywhere
    // else, touching only the pivot row's nonzero columns.
    std::vector<Rational>& prow = tab[leave];
    Rational pivot = prow[enter];
    std::vector<int> nonzero;
    nonzero.reserve(cols + 1);
    for (int j = 0; j <= cols; ++j) {
      if (prow[j].sign() != 0) {
        if (pivot != Rational(1)) prow[j] /= pivot;
        nonzero.push_back(j);
      }
    }
    for (int i = 0; i < rows; ++i) {
      if (i == leave) continue;
      Rational factor = tab[i][enter];
      if (factor.sign() == 0) continue;
      for (int j : nonzero) tab[i][j] -= factor * prow[j];
    }
    {
      Rational factor = cost[enter];
      if (factor.sign() != 0) {
        for (int j : nonzero) {
          if (j < cols) cost[j] -= factor * prow[j];
          else objective -= factor * prow[j];
        }
      }
    }
    basis[leave] = enter;
  }
}

}  // namespace lp_internal

// Solves the program exactly. Optimal results satisfy every constraint and
// reproduce the reported objective value on re-substitution (verified before
// returning; a failure would throw std::logic_error, and never happens for a
// correct build).
inline LpResult solve_max(const LinearProgram& lp, LpStats* stats = nullptr) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.constraints.size());
  if (static_cast<int>(lp.objective.size()) != n) {
    throw std::invalid_argument("solve_max: objective size mismatch");
  }
  for (const LinearConstraint& c : lp.constraints) {
    if (static_cast<int>(c.coeffs.size()) != n) {
      throw std::invalid_argument("solve_max: constraint size mismatch");
    }
  }
  LpStats local;
  LpStats& st = stats ? *stats : local;
  ++st.solves;

  // Layout: original vars, then one slack/surplus per inequality, then one
  // artificial per >=/= row. Rows are normalized to rhs >= 0.
  int num_slack = 0, num_artificial = 0;
  for (const LinearConstraint& c : lp.constraints) {
    Rational rhs = c.rhs;
    bool flip = rhs.sign() < 0;
    ConstraintSense sense = c.sense;
    if (flip && sense != ConstraintSense::Equal) {
      sense = sense == ConstraintSense::LessEq ? ConstraintSense::GreaterEq
                                               : ConstraintSense::LessEq;
    }
    if (sense != ConstraintSense::Equal) ++num_slack;
    if (sense != ConstraintSense::LessEq) ++num_artificial;
  }
  const int cols = n + num_slack + num_artificial;
  const int art_begin = n + num_slack;

  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols + 1));
  std::vector<int> basis(m, -1);
  {
    int next_slack = n, next_art = art_begin;
    for (int i = 0; i < m; ++i) {
      const LinearConstraint& c = lp.constraints[i];
      bool flip = c.rhs.sign() < 0;
      ConstraintSense sense = c.sense;
      if (flip && sense != ConstraintSense::Equal) {
        sense = sense == ConstraintSense::LessEq ? ConstraintSense::GreaterEq
                                                 : ConstraintSense::LessEq;
      }
      for (int j = 0; j < n; ++j) {
        tab[i][j] = flip ? -c.coeffs[j] : c.coeffs[j];
      }
      tab[i][cols] = flip ? -c.rhs : c.rhs;
      if (sense == ConstraintSense::LessEq) {
        tab[i][next_slack] = Rational(1);
        basis[i] = next_slack++;
      } else if (sense == ConstraintSense::GreaterEq) {
        tab[i][next_slack++] = Rational(-1);
        tab[i][next_art] = Rational(1);
        basis[i] = next_art++;
      } else {
        tab[i][next_art] = Rational(1);
        basis[i] = next_art++;
      }
    }
  }

  std::vector<bool> blocked(cols, false);
  LpResult out;

  // Phase 1: maximize -(sum of artificials); feasible iff the optimum is 0.
  if (num_artificial > 0) {
    std::vector<Rational> cost(cols);
    Rational objective;
    // cost[j] = z_j - c_j with c = -1 on artificials: start from c_B = -1 on
    // the artificial basis rows.
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= art_begin) {
        for (int j = 0; j < cols; ++j) cost[j] -= tab[i][j];
        objective -= tab[i][cols];
      }
    }
    for (int j = art_begin; j < cols; ++j) cost[j] += Rational(1);
    if (!lp_internal::bland_pass(tab, cost, objective, basis, blocked,
                                 st.pivots)) {
      throw std::logic_error("solve_max: phase 1 cannot be unbounded");
    }
    if (objective.sign() != 0) {
      out.status = LpResult::Status::Infeasible;
      return out;
    }
    // Drive surviving artificials out of the basis; a row with no usable
    // pivot is a redundant constraint and is dropped.
    for (int i = m - 1; i >= 0; --i) {
      if (basis[i] < art_begin) continue;
      int enter = -1;
      for (int j = 0; j < art_begin; ++j) {
        if (tab[i][j].sign() != 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        tab.erase(tab.begin() + i);
        basis.erase(basis.begin() + i);
        continue;
      }
      Rational pivot = tab[i][enter];
      for (int j = 0; j <= cols; ++j) {
        if (tab[i][j].sign() != 0) tab[i][j] /= pivot;
      }
      for (std::size_t r = 0; r < tab.size(); ++r) {
        if (static_cast<int>(r) == i) continue;
        Rational factor = tab[r][enter];
        if (factor.sign() == 0) continue;
        for (int j = 0; j <= cols; ++j) {
          if (tab[i][j].sign() != 0) tab[r][j] -= factor * tab[i][j];
        }
      }
      basis[i] = enter;
    }
    for (int j = art_begin; j < cols; ++j) blocked[j] = true;
  }

  // Phase 2: the real objective, priced for the current basis.
  {
    std::vector<Rational> c(cols);
    for (int j = 0; j < n; ++j) c[j] = lp.objective[j];
    std::vector<Rational> cost(cols);
    Rational objective;
    for (int j = 0; j < cols; ++j) cost[j] = -c[j];
    for (std::size_t i = 0; i < tab.size(); ++i) {
      const Rational& cb = c[basis[i]];
      if (cb.sign() == 0) continue;
      for (int j = 0; j < cols; ++j) {
        if (tab[i][j].sign() != 0) cost[j] += cb * tab[i][j];
      }
      objective += cb * tab[i][cols];
    }
    if (!lp_internal::bland_pass(tab, cost, objective, basis, blocked,
                                 st.pivots)) {
      out.status = LpResult::Status::Unbounded;
      return out;
    }
    out.status = LpResult::Status::Optimal;
    out.assignment.assign(n, Rational(0));
    for (std::size_t i = 0; i < tab.size(); ++i) {
      if (basis[i] < n) out.assignment[basis[i]] = tab[i][cols];
    }
    out.value = objective;
  }

  // Verify the claimed optimum against the original program.
  Rational check_value;
  for (int j = 0; j < n; ++j) {
    if (out.assignment[j].sign() < 0) {
      throw std::logic_error("solve_max: negative variable in solution");
    }
    check_value += lp.objective[j] * out.assignment[j];
  }
  if (check_value != out.value) {
    throw std::logic_error("solve_max: objective mismatch on re-substitution");
  }
  for (const LinearConstraint& c : lp.constraints) {
    Rational lhs;
    for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * out.assignment[j];
    bool ok = c.sense == ConstraintSense::LessEq
                  ? lhs <= c.rhs
                  : (c.sense == ConstraintSense::Equal ? lhs == c.rhs
                                                       : lhs >= c.rhs);
    if (!ok) {
      throw std::logic_error("solve_max: constraint violated on re-substitution");
    }
  }
  ++st.verified_optima;
  return out;
}

}  // namespace matchaudit
