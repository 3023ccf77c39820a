/*
 Copyright 2026 The actsched Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ACTSCHED_ORACLE_HPP
#define ACTSCHED_ORACLE_HPP

// Discretized relaxed problem solved as a fractional knapsack over grid
// cells. Shares the profile sampling with the solver but none of the
// rearrangement or thresholding code.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "actsched/gramian.hpp"
#include "actsched/scheduler.hpp"

namespace actsched {

struct CellSelection {
  int actuators = 0;
  int cells = 0;
  double cell_measure = 0.0;
  // Cell values and weights, actuator-major: index i * cells + k.
  std::vector<double> values;
  std::vector<double> weights;
  double total_measure = 0.0;
  double objective = 0.0;
  int fractional_cells = 0;
  // Value of the last cell that received weight.
  double cutoff_value = 0.0;

  double weight(int i, int k) const {
    return weights[static_cast<std::size_t>(i) * static_cast<std::size_t>(cells) +
                   static_cast<std::size_t>(k)];
  }
};

/// Midpoint samples f_i(t_k + h/2) of every grid cell, taken from a profile
/// sampled at twice the resolution.
inline std::vector<double> midpoint_cell_values(const LtiSystem& sys) {
  LtiSystem fine = sys;
  fine.cells = 2 * sys.cells;
  const ActuatorProfiles prof(fine);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(sys.actuators()) *
              static_cast<std::size_t>(sys.cells));
  for (int i = 0; i < sys.actuators(); ++i) {
    const auto& v = prof.values(i);
    for (int k = 0; k < sys.cells; ++k) out.push_back(v[static_cast<std::size_t>(2 * k + 1)]);
  }
  return out;
}

/// Greedy fill of the m*K cells in decreasing value order until the budget
/// is spent; exact for the discretized relaxation.
inline CellSelection knapsack_solve(const LtiSystem& sys) {
  validate(sys);
  CellSelection sel;
  sel.actuators = sys.actuators();
  sel.cells = sys.cells;
  sel.cell_measure = sys.cell_measure();
  sel.values = midpoint_cell_values(sys);
  sel.weights.assign(sel.values.size(), 0.0);

  std::vector<std::size_t> order(sel.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Index order is (actuator, time) order, so a stable sort breaks ties.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sel.values[x] > sel.values[y];
  });

  double remaining = sys.budget;
  for (std::size_t idx : order) {
    if (remaining <= 0.0) break;
    const double w = std::min(1.0, remaining / sel.cell_measure);
    sel.weights[idx] = w;
    sel.objective += w * sel.values[idx] * sel.cell_measure;
    sel.total_measure += w * sel.cell_measure;
    sel.cutoff_value = sel.values[idx];
    if (w < 1.0) ++sel.fractional_cells;
    remaining -= w * sel.cell_measure;
    if (w < 1.0) break;
  }
  return sel;
}

struct OracleComparison {
  double oracle_objective = 0.0;
  double optimal_cost = 0.0;
  // |oracle - optimal_cost| / max(1, oracle)
  double residual = 0.0;
  // |oracle - optimal_cost| / oracle
  double relative_residual = 0.0;
  // Σ over cells of |oracle weight * h - schedule measure in the cell|
  double symmetric_difference = 0.0;
  double allowed_difference = 0.0;
  bool sets_agree = false;
};

/// Residual between the oracle optimum and a solver report, and how far the
/// oracle's cells are from the canonical schedule.
///
/// Every switching time can split one cell, so the allowance is flat_tol plus
/// half a cell per switch, plus twice the free measure on a flat.
inline OracleComparison compare(const LtiSystem& sys, const SolutionReport& rep,
                                const CellSelection& sel) {
  OracleComparison out;
  out.oracle_objective = sel.objective;
  out.optimal_cost = rep.optimal_cost;
  const double gap = std::abs(sel.objective - rep.optimal_cost);
  out.residual = gap / std::max(1.0, std::abs(sel.objective));
  out.relative_residual = gap / std::max(std::abs(sel.objective), 1e-300);

  const double h = sel.cell_measure;
  std::size_t switches = 0;
  for (int i = 0; i < sel.actuators; ++i) {
    const auto list = i < rep.canonical.size()
                          ? normalized(rep.canonical.actuators[static_cast<std::size_t>(i)])
                          : std::vector<Interval>{};
    for (const auto& iv : list) {
      switches += (iv.start > 0.0 ? 1 : 0) + (iv.end < sys.horizon ? 1 : 0);
    }
    std::size_t j = 0;
    for (int k = 0; k < sel.cells; ++k) {
      const double lo = h * k;
      const double hi = k + 1 == sel.cells ? sys.horizon : h * (k + 1);
      while (j < list.size() && list[j].end <= lo) ++j;
      double covered = 0.0;
      for (std::size_t q = j; q < list.size() && list[q].start < hi; ++q) {
        covered += std::max(0.0, std::min(hi, list[q].end) - std::max(lo, list[q].start));
      }
      out.symmetric_difference += std::abs(sel.weight(i, k) * h - covered);
    }
  }
  const double free = rep.flat_dof ? rep.flat_dof->free_measure : 0.0;
  out.allowed_difference =
      sys.flat_tolerance() + 0.5 * h * static_cast<double>(switches) + 2.0 * free;
  out.sets_agree = out.symmetric_difference <= out.allowed_difference;
  return out;
}

inline OracleComparison compare(const LtiSystem& sys, const SolutionReport& rep) {
  return compare(sys, rep, knapsack_solve(sys));
}

}  // namespace actsched

#endif  // ACTSCHED_ORACLE_HPP
