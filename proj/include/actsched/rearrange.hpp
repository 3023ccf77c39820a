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
#ifndef ACTSCHED_REARRANGE_HPP
#define ACTSCHED_REARRANGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "actsched/error.hpp"
#include "actsched/gramian.hpp"

namespace actsched {

/// One step of the rearranged function: `count` grid cells sharing `value`.
struct RearrangedCell {
  double value = 0.0;
  double measure = 0.0;
  std::int64_t count = 0;
  // Raw extremes of the merged source cells.
  double highest = 0.0;
  double lowest = 0.0;
};

/// Non-increasing rearrangement of a sampled profile, stored as a step
/// function with strictly decreasing values.
///
/// Measures are integer cell counts times the common cell width, so level-set
/// measures of the source and of the rearrangement agree bit for bit.
class RearrangedProfile {
 public:
  RearrangedProfile() = default;
  RearrangedProfile(std::vector<RearrangedCell> cells, double source_measure,
                    double cell_width, double tie_tol)
      : cells_(std::move(cells)),
        source_measure_(source_measure),
        cell_width_(cell_width),
        tie_tol_(tie_tol) {
    cumulative_measure_.assign(cells_.size() + 1, 0.0);
    cumulative_integral_.assign(cells_.size() + 1, 0.0);
    std::int64_t running = 0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      running += cells_[i].count;
      cumulative_measure_[i + 1] = static_cast<double>(running) * cell_width_;
      cumulative_integral_[i + 1] =
          cumulative_integral_[i] + cells_[i].value * cells_[i].measure;
    }
  }

  const std::vector<RearrangedCell>& cells() const { return cells_; }
  double source_measure() const { return source_measure_; }
  double cell_width() const { return cell_width_; }
  double tie_tol() const { return tie_tol_; }
  const std::vector<double>& cumulative_measure() const { return cumulative_measure_; }
  const std::vector<double>& cumulative_integral() const { return cumulative_integral_; }

  bool ties(double v, double theta) const {
    return std::abs(v - theta) <= tie_tol_ * std::max(std::abs(v), std::abs(theta));
  }

  /// Index of the step covering x, with steps closed on the right:
  /// x in (m_i, m_{i+1}] maps to step i, and x = 0 to the first step.
  std::size_t index_at(double x) const {
    check_domain(x);
    const double eps = 1e-12 * source_measure_;
    const auto it = std::lower_bound(cumulative_measure_.begin() + 1,
                                     cumulative_measure_.end(), x - eps);
    const auto idx = static_cast<std::size_t>(it - (cumulative_measure_.begin() + 1));
    return std::min(idx, cells_.size() - 1);
  }

  void check_domain(double x) const {
    const double eps = 1e-12 * source_measure_;
    if (!(x >= -eps && x <= source_measure_ + eps)) {
      throw Error(ErrorKind::kOutOfDomain, "point outside [0, source_measure]");
    }
  }

 private:
  std::vector<RearrangedCell> cells_;
  double source_measure_ = 0.0;
  double cell_width_ = 0.0;
  double tie_tol_ = 1e-9;
  std::vector<double> cumulative_measure_;
  std::vector<double> cumulative_integral_;
};

/// Sorts the cell surrogate of `profile` into non-increasing order and merges
/// values that agree to within `tie_tol` (relative).
inline RearrangedProfile rearrange(const SampledProfile& profile,
                                   double tie_tol = 1e-9) {
  validate(profile);
  std::vector<double> values = profile.cell_values();
  std::sort(values.begin(), values.end(), std::greater<>());
  const double width = profile.cell_measure();

  std::vector<RearrangedCell> cells;
  std::size_t i = 0;
  while (i < values.size()) {
    const double head = values[i];
    double sum = 0.0;
    std::size_t j = i;
    while (j < values.size() && head - values[j] <= tie_tol * head) {
      sum += values[j];
      ++j;
    }
    RearrangedCell cell;
    cell.count = static_cast<std::int64_t>(j - i);
    cell.highest = head;
    cell.lowest = values[j - 1];
    cell.value = std::clamp(sum / static_cast<double>(cell.count), cell.lowest,
                            cell.highest);
    cell.measure = static_cast<double>(cell.count) * width;
    cells.push_back(cell);
    i = j;
  }
  return RearrangedProfile(std::move(cells), profile.measure(), width, tie_tol);
}

/// F*(x). Left-continuous at step boundaries: F*(x) is the value of the step
/// covering (x - eps, x], which matches sup{t : μ{F > t} >= x}.
inline double eval(const RearrangedProfile& r, double x) {
  return r.cells()[r.index_at(x)].value;
}

/// μ{F > θ}; values within tie_tol of θ count as equal.
inline double level_measure_gt(const RearrangedProfile& r, double theta) {
  const auto& cells = r.cells();
  const auto it = std::partition_point(cells.begin(), cells.end(), [&](const RearrangedCell& c) {
    return c.value > theta && !r.ties(c.value, theta);
  });
  return r.cumulative_measure()[static_cast<std::size_t>(it - cells.begin())];
}

/// μ{F >= θ}; values within tie_tol of θ count as equal.
inline double level_measure_ge(const RearrangedProfile& r, double theta) {
  const auto& cells = r.cells();
  const auto it = std::partition_point(cells.begin(), cells.end(), [&](const RearrangedCell& c) {
    return c.value > theta || r.ties(c.value, theta);
  });
  return r.cumulative_measure()[static_cast<std::size_t>(it - cells.begin())];
}

/// ∫_0^x F*(s) ds for the step representation.
inline double cum_integral(const RearrangedProfile& r, double x) {
  const std::size_t i = r.index_at(x);
  x = std::clamp(x, 0.0, r.source_measure());
  const double start = r.cumulative_measure()[i];
  return r.cumulative_integral()[i] + (x - start) * r.cells()[i].value;
}

enum class Shape { kStrictRight, kStrictLeft, kStrictBoth, kFlat };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::kStrictRight: return "strict_right";
    case Shape::kStrictLeft: return "strict_left";
    case Shape::kStrictBoth: return "strict_both";
    case Shape::kFlat: return "flat";
  }
  return "unknown";
}

/// Largest open interval (b_left, b_right) on which F* equals `value`.
struct FlatInterval {
  double b_left = 0.0;
  double b_right = 0.0;
  double value = 0.0;
};

/// Local behaviour of F* around a point: how it decreases there, the value
/// F*(x), and the level-set measures that decided it.
struct LocalShape {
  Shape shape = Shape::kStrictBoth;
  double value = 0.0;
  double level_gt = 0.0;  // μ{F > value}
  double level_ge = 0.0;  // μ{F >= value}

  std::optional<FlatInterval> flat() const {
    if (shape != Shape::kFlat) return std::nullopt;
    return FlatInterval{level_gt, level_ge, value};
  }
};

/// Classifies F* at an interior point x at resolution `flat_tol`.
///
/// F* is strictly decreasing on the right at x iff μ{F >= F*(x)} = x and
/// strictly decreasing from the left iff μ{F > F*(x)} = x; a level set wider
/// than flat_tol that contains x on neither edge is a flat.
inline LocalShape flat_interval_at(const RearrangedProfile& r, double x,
                                   double flat_tol) {
  if (!(x > 0.0 && x < r.source_measure())) {
    throw Error(ErrorKind::kOutOfDomain, "classification point must be interior");
  }
  LocalShape out;
  out.value = eval(r, x);
  out.level_gt = level_measure_gt(r, out.value);
  out.level_ge = level_measure_ge(r, out.value);
  const double width = out.level_ge - out.level_gt;
  if (width <= flat_tol) {
    out.shape = Shape::kStrictBoth;
  } else if (std::abs(out.level_ge - x) <= flat_tol && out.level_gt < x) {
    out.shape = Shape::kStrictRight;
  } else if (std::abs(out.level_gt - x) <= flat_tol && x < out.level_ge) {
    out.shape = Shape::kStrictLeft;
  } else {
    out.shape = Shape::kFlat;
  }
  return out;
}

/// Residuals of the basic rearrangement identities for a pair of profiles on
/// the same grid.
struct PropositionReport {
  // |∫f - ∫f*| / max(∫f, tiny), and the same for g.
  double l1_residual_f = 0.0;
  double l1_residual_g = 0.0;
  // max over the θ sweep of |μ{f > θ} - μ{f* > θ}|, for f and g.
  double level_set_discrepancy = 0.0;
  int level_set_checks = 0;
  // ∫fg - ∫f*g*; must be <= 0 up to rounding.
  double hardy_littlewood_gap = 0.0;
  double hardy_littlewood_rhs = 0.0;
  // Only meaningful when f <= g on every node.
  bool monotonicity_applicable = false;
  int monotonicity_violations = 0;
  // Only meaningful when f <= 1 (resp. g <= 1) on every node.
  bool bounded_applicable = false;
  int bounded_violations = 0;
};

namespace detail {

// ∫ u*v over two step functions that share a cell width, walked in counts.
template <typename Fn>
void walk_steps(const RearrangedProfile& u, const RearrangedProfile& v, Fn&& fn) {
  std::size_t i = 0, j = 0;
  std::int64_t left_u = u.cells().empty() ? 0 : u.cells()[0].count;
  std::int64_t left_v = v.cells().empty() ? 0 : v.cells()[0].count;
  while (i < u.cells().size() && j < v.cells().size()) {
    const std::int64_t take = std::min(left_u, left_v);
    fn(u.cells()[i].value, v.cells()[j].value, take);
    left_u -= take;
    left_v -= take;
    if (left_u == 0 && ++i < u.cells().size()) left_u = u.cells()[i].count;
    if (left_v == 0 && ++j < v.cells().size()) left_v = v.cells()[j].count;
  }
}

inline double raw_measure_gt(const std::vector<double>& cell_values, double theta,
                             double width) {
  std::int64_t count = 0;
  for (double c : cell_values) count += c > theta ? 1 : 0;
  return static_cast<double>(count) * width;
}

inline double rearranged_measure_gt(const RearrangedProfile& r, double theta) {
  std::int64_t count = 0;
  for (const auto& c : r.cells()) {
    if (c.value > theta) count += c.count;
  }
  return static_cast<double>(count) * r.cell_width();
}

inline double level_sweep(const SampledProfile& p, const RearrangedProfile& r,
                          int& checks) {
  const auto values = p.cell_values();
  double worst = 0.0;
  const auto& cells = r.cells();
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    // Midpoint of the gap between adjacent merged groups.
    const double theta = 0.5 * (cells[i].lowest + cells[i + 1].highest);
    const double diff = std::abs(raw_measure_gt(values, theta, r.cell_width()) -
                                 rearranged_measure_gt(r, theta));
    worst = std::max(worst, diff);
    ++checks;
  }
  return worst;
}

}  // namespace detail

inline PropositionReport check_propositions(const SampledProfile& f,
                                            const SampledProfile& g,
                                            double tie_tol = 1e-9) {
  validate(f);
  validate(g);
  if (f.domain_start != g.domain_start || f.domain_end != g.domain_end ||
      f.cells() != g.cells()) {
    throw Error(ErrorKind::kDomainMismatch, "profiles are not on the same grid");
  }
  const auto fr = rearrange(f, tie_tol);
  const auto gr = rearrange(g, tie_tol);
  const auto fc = f.cell_values();
  const auto gc = g.cell_values();
  const double width = f.cell_measure();

  PropositionReport rep;
  const auto l1 = [](const SampledProfile& p, const RearrangedProfile& r) {
    const double direct = p.integral();
    const double sorted = r.cumulative_integral().back();
    return std::abs(direct - sorted) / std::max(std::abs(direct), 1e-300);
  };
  rep.l1_residual_f = l1(f, fr);
  rep.l1_residual_g = l1(g, gr);

  rep.level_set_discrepancy = std::max(detail::level_sweep(f, fr, rep.level_set_checks),
                                       detail::level_sweep(g, gr, rep.level_set_checks));

  double lhs = 0.0;
  for (std::size_t k = 0; k < fc.size(); ++k) lhs += fc[k] * gc[k];
  lhs *= width;
  double rhs = 0.0;
  detail::walk_steps(fr, gr, [&](double a, double b, std::int64_t n) {
    rhs += a * b * static_cast<double>(n);
  });
  rhs *= width;
  rep.hardy_littlewood_gap = lhs - rhs;
  rep.hardy_littlewood_rhs = rhs;

  rep.monotonicity_applicable = true;
  for (std::size_t p = 0; p < f.pieces.size(); ++p) {
    for (std::size_t k = 0; k < f.pieces[p].size(); ++k) {
      if (f.pieces[p][k] > g.pieces[p][k]) rep.monotonicity_applicable = false;
    }
  }
  if (rep.monotonicity_applicable) {
    detail::walk_steps(fr, gr, [&](double a, double b, std::int64_t) {
      if (a > b && !fr.ties(a, b)) ++rep.monotonicity_violations;
    });
  }

  const bool f_bounded = f.max_value() <= 1.0;
  const bool g_bounded = g.max_value() <= 1.0;
  rep.bounded_applicable = f_bounded || g_bounded;
  if (f_bounded) {
    for (const auto& c : fr.cells()) rep.bounded_violations += c.value > 1.0 ? 1 : 0;
  }
  if (g_bounded) {
    for (const auto& c : gr.cells()) rep.bounded_violations += c.value > 1.0 ? 1 : 0;
  }
  return rep;
}

}  // namespace actsched

#endif  // ACTSCHED_REARRANGE_HPP
