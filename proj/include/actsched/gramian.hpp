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
#ifndef ACTSCHED_GRAMIAN_HPP
#define ACTSCHED_GRAMIAN_HPP

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "actsched/error.hpp"
#include "actsched/linalg.hpp"

namespace actsched {

/// Problem instance: x' = A x + B V(t) u on [0, horizon] with total
/// actuation time `budget`.
struct LtiSystem {
  Matrix a;
  Matrix b;
  double horizon = 1.0;
  double budget = 0.5;
  int cells = 4096;
  double tie_tol = 1e-9;
  // Defaults to two cell widths when unset.
  std::optional<double> flat_tol;
  // Zero columns give identically-zero profiles instead of a ZeroColumn
  // error. Off by default so actuator indices are never silently remapped.
  bool allow_zero_columns = false;

  int states() const { return static_cast<int>(a.rows()); }
  int actuators() const { return static_cast<int>(b.cols()); }
  double cell_measure() const { return horizon / static_cast<double>(cells); }
  double flat_tolerance() const {
    return flat_tol.value_or(2.0 * cell_measure());
  }
  double total_measure() const { return horizon * actuators(); }
  UniformGrid grid() const { return {0.0, horizon, cells}; }
};

inline bool is_zero_column(const Matrix& b, int column) {
  return b.col(column).cwiseAbs().maxCoeff() == 0.0;
}

inline bool budget_in_range(const LtiSystem& sys) {
  return std::isfinite(sys.budget) && sys.budget > 0.0 &&
         sys.budget < sys.total_measure();
}

inline void validate(const LtiSystem& sys) {
  const auto n = sys.a.rows();
  if (n < 1 || sys.a.cols() != n) {
    throw Error(ErrorKind::kInvalidArgument, "A must be a non-empty square matrix");
  }
  if (sys.b.rows() != n || sys.b.cols() < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "B must have as many rows as A and at least one column");
  }
  if (!sys.a.allFinite() || !sys.b.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "A and B must have finite entries");
  }
  if (!std::isfinite(sys.horizon) || sys.horizon <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "horizon T must be positive");
  }
  if (!budget_in_range(sys)) {
    throw Error(ErrorKind::kInvalidArgument,
                "alpha must lie in the open interval (0, m*T)");
  }
  if (sys.cells < 16) {
    throw Error(ErrorKind::kInvalidArgument, "cells per actuator K must be >= 16");
  }
  if (!(sys.tie_tol > 0.0 && sys.tie_tol < 1e-2)) {
    throw Error(ErrorKind::kInvalidArgument, "tie_tol must lie in (0, 1e-2)");
  }
  if (sys.flat_tol && !(*sys.flat_tol >= 0.0 && std::isfinite(*sys.flat_tol))) {
    throw Error(ErrorKind::kInvalidArgument, "flat_tol must be finite and >= 0");
  }
  if (!sys.allow_zero_columns) {
    for (int i = 0; i < sys.actuators(); ++i) {
      if (is_zero_column(sys.b, i)) {
        throw Error(ErrorKind::kZeroColumn,
                    "column " + std::to_string(i + 1) + " of B is zero");
      }
    }
  }
}

/// Removes zero columns of B. Returns the reduced system and the 1-based
/// source column of every surviving actuator.
inline std::pair<LtiSystem, std::vector<int>> drop_zero_columns(
    const LtiSystem& sys) {
  std::vector<int> kept;
  for (int i = 0; i < sys.actuators(); ++i) {
    if (!is_zero_column(sys.b, i)) kept.push_back(i + 1);
  }
  LtiSystem reduced = sys;
  reduced.b = Matrix(sys.b.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    reduced.b.col(static_cast<Eigen::Index>(j)) = sys.b.col(kept[j] - 1);
  }
  return {std::move(reduced), std::move(kept)};
}

/// A nonnegative function sampled on a uniform grid.
///
/// The domain may be split into several equal-width pieces, each holding its
/// own node values; the concatenated profile keeps one piece per actuator so
/// the jump at every junction survives. All cells share one width.
struct SampledProfile {
  double domain_start = 0.0;
  double domain_end = 1.0;
  std::vector<std::vector<double>> pieces;
  std::optional<int> actuator_index;

  int cells() const {
    int total = 0;
    for (const auto& piece : pieces) total += static_cast<int>(piece.size()) - 1;
    return total;
  }
  double measure() const { return domain_end - domain_start; }
  double cell_measure() const { return measure() / static_cast<double>(cells()); }

  /// Piecewise-constant surrogate: every cell carries the mean of its nodes.
  std::vector<double> cell_values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cells()));
    for (const auto& piece : pieces) {
      for (std::size_t k = 0; k + 1 < piece.size(); ++k) {
        out.push_back(0.5 * (piece[k] + piece[k + 1]));
      }
    }
    return out;
  }

  double integral() const {
    double sum = 0.0;
    for (double v : cell_values()) sum += v;
    return sum * cell_measure();
  }

  double max_value() const {
    double best = 0.0;
    for (const auto& piece : pieces) {
      for (double v : piece) best = std::max(best, v);
    }
    return best;
  }

  static SampledProfile from_values(double start, double end,
                                    std::vector<double> nodes) {
    SampledProfile p;
    p.domain_start = start;
    p.domain_end = end;
    p.pieces.push_back(std::move(nodes));
    return p;
  }

  static SampledProfile from_function(double start, double end, int cells,
                                      const std::function<double(double)>& fn) {
    const UniformGrid grid{start, end, cells};
    std::vector<double> nodes(static_cast<std::size_t>(grid.nodes()));
    for (int k = 0; k < grid.nodes(); ++k) nodes[static_cast<std::size_t>(k)] = fn(grid.node(k));
    return from_values(start, end, std::move(nodes));
  }
};

inline void validate(const SampledProfile& p) {
  if (!(p.domain_end > p.domain_start) || !std::isfinite(p.domain_start) ||
      !std::isfinite(p.domain_end)) {
    throw Error(ErrorKind::kInvalidArgument, "profile domain must be non-empty");
  }
  if (p.pieces.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "profile has no samples");
  }
  const std::size_t width = p.pieces.front().size();
  for (const auto& piece : p.pieces) {
    if (piece.size() < 2 || piece.size() != width) {
      throw Error(ErrorKind::kInvalidArgument,
                  "profile pieces need equal node counts of at least two");
    }
    for (double v : piece) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kNonFinite, "profile value is not finite");
      }
      if (v < 0.0) {
        throw Error(ErrorKind::kNegativeValue, "profile value is negative");
      }
    }
  }
}

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Binary actuator schedule: v_i = 1 on the listed closed intervals.
struct Schedule {
  std::vector<std::vector<Interval>> actuators;

  Schedule() = default;
  explicit Schedule(int m) : actuators(static_cast<std::size_t>(m)) {}

  int size() const { return static_cast<int>(actuators.size()); }
  std::size_t interval_count() const {
    std::size_t n = 0;
    for (const auto& a : actuators) n += a.size();
    return n;
  }
};

/// Sorts and coalesces overlapping or touching intervals, drops empty ones.
inline std::vector<Interval> normalized(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& x, const Interval& y) { return x.start < y.start; });
  std::vector<Interval> out;
  for (const auto& iv : intervals) {
    if (!(iv.end > iv.start)) continue;
    if (!out.empty() && iv.start <= out.back().end) {
      out.back().end = std::max(out.back().end, iv.end);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

inline void validate(const Schedule& s, double horizon) {
  const double slack = 1e-12 * horizon;
  for (std::size_t i = 0; i < s.actuators.size(); ++i) {
    const auto& list = s.actuators[i];
    for (std::size_t j = 0; j < list.size(); ++j) {
      const auto& iv = list[j];
      if (!std::isfinite(iv.start) || !std::isfinite(iv.end) ||
          iv.start < -slack || iv.end > horizon + slack) {
        throw Error(ErrorKind::kIntervalOutOfRange,
                    "actuator " + std::to_string(i + 1) +
                        " has an interval outside [0, T]");
      }
      if (iv.start > iv.end) {
        throw Error(ErrorKind::kInvalidArgument,
                    "actuator " + std::to_string(i + 1) +
                        " has an interval with start > end");
      }
      if (j > 0 && iv.start < list[j - 1].end) {
        throw Error(ErrorKind::kInvalidArgument,
                    "actuator " + std::to_string(i + 1) +
                        " has unsorted or overlapping intervals");
      }
    }
  }
}

/// Total Lebesgue measure of the schedule across actuators.
inline double budget(const Schedule& s) {
  double total = 0.0;
  for (const auto& list : s.actuators) {
    for (const auto& iv : list) total += iv.length();
  }
  return total;
}

inline double intersection_measure(const std::vector<Interval>& x,
                                   const std::vector<Interval>& y) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].start, y[j].start);
    const double hi = std::min(x[i].end, y[j].end);
    if (hi > lo) total += hi - lo;
    if (x[i].end < y[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

/// Measure of the symmetric difference, summed over actuators.
inline double symmetric_difference(const Schedule& x, const Schedule& y) {
  const std::size_t m = std::max(x.actuators.size(), y.actuators.size());
  double total = 0.0;
  static const std::vector<Interval> kEmpty;
  for (std::size_t i = 0; i < m; ++i) {
    const auto xi = normalized(i < x.actuators.size() ? x.actuators[i] : kEmpty);
    const auto yi = normalized(i < y.actuators.size() ? y.actuators[i] : kEmpty);
    double mx = 0.0, my = 0.0;
    for (const auto& iv : xi) mx += iv.length();
    for (const auto& iv : yi) my += iv.length();
    total += mx + my - 2.0 * intersection_measure(xi, yi);
  }
  return total;
}

/// Sampled states y_k = e^{A t_k} b_i and profile values |y_k|^2 for every
/// actuator, plus exact off-grid evaluation of f_i.
class ActuatorProfiles {
 public:
  explicit ActuatorProfiles(const LtiSystem& sys, int threads = 1)
      : a_(sys.a), grid_(sys.grid()) {
    const int m = sys.actuators();
    for (int i = 0; i < m; ++i) {
      if (!sys.allow_zero_columns && is_zero_column(sys.b, i)) {
        throw Error(ErrorKind::kZeroColumn,
                    "column " + std::to_string(i + 1) + " of B is zero");
      }
    }
    states_.resize(static_cast<std::size_t>(m));
    values_.resize(static_cast<std::size_t>(m));
    auto work = [&](int i) {
      auto& states = states_[static_cast<std::size_t>(i)];
      states = propagate(sys.a, sys.b.col(i), grid_);
      auto& vals = values_[static_cast<std::size_t>(i)];
      vals.resize(states.size());
      for (std::size_t k = 0; k < states.size(); ++k) vals[k] = states[k].squaredNorm();
    };
    if (threads <= 1 || m == 1) {
      for (int i = 0; i < m; ++i) work(i);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(static_cast<std::size_t>(m));
      const int workers = std::min(threads, m);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (int i = w; i < m; i += workers) {
            try {
              work(i);
            } catch (...) {
              failures[static_cast<std::size_t>(i)] = std::current_exception();
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    }
  }

  int actuators() const { return static_cast<int>(values_.size()); }
  const UniformGrid& grid() const { return grid_; }
  double horizon() const { return grid_.end; }
  const std::vector<double>& values(int i) const {
    return values_[static_cast<std::size_t>(i)];
  }

  /// f_i(t) = |e^{A t} b_i|^2, propagated from the nearest node at or
  /// before t.
  double value_at(int i, double t) const {
    const double h = grid_.width();
    t = std::clamp(t, 0.0, grid_.end);
    int k = static_cast<int>(std::floor(t / h));
    k = std::clamp(k, 0, grid_.cells);
    if (grid_.node(k) > t && k > 0) --k;
    const double dt = t - grid_.node(k);
    const auto& y = states_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    if (dt <= 0.0) return y.squaredNorm();
    return (mat_exp(a_, dt) * y).squaredNorm();
  }

  SampledProfile profile(int i) const {
    auto p = SampledProfile::from_values(0.0, grid_.end, values(i));
    p.actuator_index = i + 1;
    return p;
  }

  /// ∫_s^e f_i by the trapezoidal rule on the grid, with partial cells
  /// closed off by exact endpoint values.
  double integrate(int i, double s, double e) const {
    if (!(e > s)) return 0.0;
    const auto& v = values(i);
    const double h = grid_.width();
    const auto cell_of = [&](double t) {
      return std::clamp(static_cast<int>(std::floor(t / h)), 0, grid_.cells - 1);
    };
    const int k0 = cell_of(s);
    const int k1 = cell_of(e);
    const double fs = value_at(i, s);
    const double fe = value_at(i, e);
    if (k0 == k1) return 0.5 * (fs + fe) * (e - s);
    double total = 0.5 * (fs + v[static_cast<std::size_t>(k0 + 1)]) *
                   (grid_.node(k0 + 1) - s);
    for (int k = k0 + 1; k < k1; ++k) {
      total += 0.5 * (v[static_cast<std::size_t>(k)] + v[static_cast<std::size_t>(k + 1)]) * h;
    }
    total += 0.5 * (v[static_cast<std::size_t>(k1)] + fe) * (e - grid_.node(k1));
    return total;
  }

 private:
  Matrix a_;
  UniformGrid grid_;
  std::vector<std::vector<Vector>> states_;
  std::vector<std::vector<double>> values_;
};

/// Profile f_i(t) = b_i^T e^{A^T t} e^{A t} b_i on [0, T]; `i` is 1-based.
inline SampledProfile profile(const LtiSystem& sys, int i) {
  if (i < 1 || i > sys.actuators()) {
    throw Error(ErrorKind::kInvalidArgument, "actuator index out of range");
  }
  if (!sys.allow_zero_columns && is_zero_column(sys.b, i - 1)) {
    throw Error(ErrorKind::kZeroColumn,
                "column " + std::to_string(i) + " of B is zero");
  }
  const auto states = propagate(sys.a, sys.b.col(i - 1), sys.grid());
  std::vector<double> values(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) values[k] = states[k].squaredNorm();
  auto p = SampledProfile::from_values(0.0, sys.horizon, std::move(values));
  p.actuator_index = i;
  return p;
}

/// F(t) = f_i(t - (i-1)T) on [(i-1)T, iT), laid out on [0, mT].
inline SampledProfile concat_profile(const ActuatorProfiles& profiles) {
  SampledProfile p;
  p.domain_start = 0.0;
  p.domain_end = profiles.horizon() * profiles.actuators();
  for (int i = 0; i < profiles.actuators(); ++i) p.pieces.push_back(profiles.values(i));
  return p;
}

inline SampledProfile concat_profile(const LtiSystem& sys) {
  return concat_profile(ActuatorProfiles(sys));
}

/// Tr(W_V) for a binary schedule, as Σ_i ∫ v_i f_i.
inline double trace_cost(const ActuatorProfiles& profiles, const Schedule& s) {
  validate(s, profiles.horizon());
  if (s.size() > profiles.actuators()) {
    throw Error(ErrorKind::kInvalidArgument, "schedule has more actuators than B");
  }
  double total = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    for (const auto& iv : s.actuators[static_cast<std::size_t>(i)]) {
      const double lo = std::clamp(iv.start, 0.0, profiles.horizon());
      const double hi = std::clamp(iv.end, 0.0, profiles.horizon());
      total += profiles.integrate(i, lo, hi);
    }
  }
  return total;
}

inline double trace_cost(const LtiSystem& sys, const Schedule& s) {
  validate(s, sys.horizon);
  return trace_cost(ActuatorProfiles(sys), s);
}

}  // namespace actsched

#endif  // ACTSCHED_GRAMIAN_HPP
