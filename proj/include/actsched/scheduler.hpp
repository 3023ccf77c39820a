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
#ifndef ACTSCHED_SCHEDULER_HPP
#define ACTSCHED_SCHEDULER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "actsched/error.hpp"
#include "actsched/gramian.hpp"
#include "actsched/rearrange.hpp"

namespace actsched {

/// Degrees of freedom of a non-unique (flat) optimum: how much of each
/// actuator's level set {f_i = threshold} is available, and how much of it
/// any optimal schedule must use in total.
struct FlatDof {
  std::vector<double> level_sets;
  double free_measure = 0.0;
};

struct SolutionReport {
  Shape shape = Shape::kStrictBoth;
  double threshold = 0.0;     // F*(alpha)
  double optimal_cost = 0.0;  // ∫_0^alpha F*
  bool unique = true;
  Schedule canonical;
  std::optional<FlatDof> flat_dof;
  std::optional<FlatInterval> flat_interval;
  double level_gt = 0.0;  // μ{F > threshold}
  double level_ge = 0.0;  // μ{F >= threshold}
};

inline bool is_constant_profile(const SampledProfile& p, double tie_tol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& piece : p.pieces) {
    for (double v : piece) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo <= tie_tol * std::abs(hi);
}

/// Everything the solver derives from a system once: sampled profiles,
/// their concatenation F and its rearrangement F*.
struct SolverContext {
  LtiSystem system;
  ActuatorProfiles profiles;
  SampledProfile concat;
  RearrangedProfile rearranged;

  explicit SolverContext(const LtiSystem& sys, int threads = 1)
      : system((validate(sys), sys)),
        profiles(system, threads),
        concat(concat_profile(profiles)),
        rearranged(rearrange(concat, system.tie_tol)) {}
};

namespace detail {

inline bool ties(double v, double theta, double tol) {
  return std::abs(v - theta) <= tol * std::max(std::abs(v), std::abs(theta));
}

inline bool constant_values(const std::vector<double>& v, double tol) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= tol * std::abs(*hi);
}

// Bisection for f_i(t) = theta between a node where the threshold predicate
// fails (`outside`) and one where it holds (`inside`).
inline double refine_crossing(const ActuatorProfiles& prof, int i, double theta,
                              double outside, double inside) {
  const double tol = 1e-12 * prof.horizon();
  const bool rising = outside < inside;
  double lo = rising ? outside : inside;
  double hi = rising ? inside : outside;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const bool above = prof.value_at(i, mid) >= theta;
    // For a rising crossing the predicate holds to the right.
    if (above == rising) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<Interval> threshold_set(const ActuatorProfiles& prof, int i,
                                           double theta, bool strict,
                                           double tie_tol) {
  const auto& v = prof.values(i);
  const auto& grid = prof.grid();
  if (constant_values(v, tie_tol)) {
    const double c = v.front();
    const bool take = ties(c, theta, tie_tol) ? !strict : c > theta;
    if (take) return {Interval{0.0, grid.end}};
    return {};
  }
  const auto pred = [&](double x) { return strict ? x > theta : x >= theta; };
  std::vector<Interval> out;
  const int last = grid.cells;
  int k = 0;
  while (k <= last) {
    if (!pred(v[static_cast<std::size_t>(k)])) {
      ++k;
      continue;
    }
    const int run_start = k;
    while (k + 1 <= last && pred(v[static_cast<std::size_t>(k + 1)])) ++k;
    const int run_end = k;
    const double s = run_start == 0
                         ? 0.0
                         : refine_crossing(prof, i, theta, grid.node(run_start - 1),
                                           grid.node(run_start));
    const double e = run_end == last
                         ? grid.end
                         : refine_crossing(prof, i, theta, grid.node(run_end + 1),
                                           grid.node(run_end));
    if (e > s) out.push_back({s, e});
    ++k;
  }
  return out;
}

// Budget of {F >= theta} from the piecewise-linear interpolant of each f_i.
inline double interpolated_measure_ge(const ActuatorProfiles& prof, double theta,
                                      double tie_tol) {
  const double h = prof.grid().width();
  double total = 0.0;
  for (int i = 0; i < prof.actuators(); ++i) {
    const auto& v = prof.values(i);
    if (constant_values(v, tie_tol)) {
      if (v.front() >= theta) total += prof.horizon();
      continue;
    }
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      const double a = v[k], b = v[k + 1];
      if (a >= theta && b >= theta) {
        total += h;
      } else if (a >= theta || b >= theta) {
        const double hi = std::max(a, b), lo = std::min(a, b);
        total += h * (hi - theta) / (hi - lo);
      }
    }
  }
  return total;
}

// Available part of each level set {f_i = level}: the whole horizon for a
// constant profile at that level, otherwise grid cells whose nodes both tie.
inline std::vector<std::vector<Interval>> level_sets(const ActuatorProfiles& prof,
                                                     double level, double tie_tol) {
  std::vector<std::vector<Interval>> out(static_cast<std::size_t>(prof.actuators()));
  const auto& grid = prof.grid();
  for (int i = 0; i < prof.actuators(); ++i) {
    const auto& v = prof.values(i);
    auto& sets = out[static_cast<std::size_t>(i)];
    if (constant_values(v, tie_tol)) {
      if (ties(v.front(), level, tie_tol)) sets.push_back({0.0, grid.end});
      continue;
    }
    for (int k = 0; k < grid.cells; ++k) {
      if (ties(v[static_cast<std::size_t>(k)], level, tie_tol) &&
          ties(v[static_cast<std::size_t>(k + 1)], level, tie_tol)) {
        sets.push_back({grid.node(k), grid.node(k + 1)});
      }
    }
    sets = normalized(std::move(sets));
  }
  return out;
}

inline double measure_of(const std::vector<Interval>& list) {
  double total = 0.0;
  for (const auto& iv : list) total += iv.length();
  return total;
}

}  // namespace detail

/// {t : f_i(t) >= θ} (or > θ when `strict`) for every actuator, as sorted
/// closed intervals with crossings refined by bisection.
inline Schedule threshold_schedule(const ActuatorProfiles& prof, double theta,
                                   bool strict, double tie_tol) {
  Schedule s(prof.actuators());
  for (int i = 0; i < prof.actuators(); ++i) {
    s.actuators[static_cast<std::size_t>(i)] =
        detail::threshold_set(prof, i, theta, strict, tie_tol);
  }
  return s;
}

inline Schedule threshold_schedule(const LtiSystem& sys, double theta, bool strict) {
  return threshold_schedule(ActuatorProfiles(sys), theta, strict, sys.tie_tol);
}

/// Strict threshold schedule at θ, topped up with `free_measure` taken from
/// the left-most parts of the level sets {f_i = θ}, lowest index first.
inline Schedule fill_flat(const ActuatorProfiles& prof, double theta,
                          double free_measure, double tie_tol, double flat_tol) {
  Schedule s = threshold_schedule(prof, theta, /*strict=*/true, tie_tol);
  if (!(free_measure > 0.0)) return s;
  const auto sets = detail::level_sets(prof, theta, tie_tol);
  double available = 0.0;
  for (const auto& list : sets) available += detail::measure_of(list);
  if (available < free_measure - flat_tol) {
    throw Error(ErrorKind::kInsufficientLevelSet,
                "level sets hold less than the free measure");
  }
  double remaining = free_measure;
  for (int i = 0; i < prof.actuators() && remaining > 0.0; ++i) {
    auto& mine = s.actuators[static_cast<std::size_t>(i)];
    for (const auto& iv : sets[static_cast<std::size_t>(i)]) {
      if (remaining <= 0.0) break;
      const double take = std::min(remaining, iv.length());
      mine.push_back({iv.start, iv.start + take});
      remaining -= take;
    }
    mine = normalized(std::move(mine));
  }
  return s;
}

inline Schedule fill_flat(const LtiSystem& sys, double theta, double free_measure) {
  return fill_flat(ActuatorProfiles(sys), theta, free_measure, sys.tie_tol,
                   sys.flat_tolerance());
}

/// Shape of F* at alpha, with F*(alpha) as the threshold.
inline LocalShape classify(const SolverContext& ctx) {
  return flat_interval_at(ctx.rearranged, ctx.system.budget,
                          ctx.system.flat_tolerance());
}

inline LocalShape classify(const LtiSystem& sys) { return classify(SolverContext(sys)); }

namespace detail {

// Threshold whose non-strict set spends exactly `target` under the exact
// profiles: a bisection on the interpolated budget, then regula falsi
// (Illinois) on the exact one.
inline double fit_threshold(const ActuatorProfiles& prof, double target,
                            double tie_tol) {
  const double total = prof.horizon() * prof.actuators();
  const double slack = 1e-12 * total;
  double top = 0.0;
  for (int i = 0; i < prof.actuators(); ++i) {
    for (double v : prof.values(i)) top = std::max(top, v);
  }
  double lo = 0.0, hi = top * (1.0 + 1e-12) + 1e-300;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (interpolated_measure_ge(prof, mid, tie_tol) >= target - slack) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  const auto excess = [&](double theta) {
    return budget(threshold_schedule(prof, theta, false, tie_tol)) - target;
  };
  const double tol = 1e-11 * total;
  double theta = lo;
  double phi = excess(theta);
  if (std::abs(phi) <= tol) return theta;

  // Bracket: phi(a) > 0 >= phi(b) with a < b.
  double a = theta, fa = phi, b = theta, fb = phi;
  double step = std::max(1e-9 * std::abs(theta), 1e-300);
  for (int it = 0; it < 60; ++it) {
    if (phi > 0.0) {
      b = std::min(theta + step, hi * (1.0 + 1e-9));
      fb = excess(b);
      if (fb <= 0.0) break;
      a = b;
      fa = fb;
    } else {
      a = std::max(theta - step, 0.0);
      fa = excess(a);
      if (fa > 0.0) break;
      b = a;
      fb = fa;
      if (a == 0.0) return a;
    }
    step *= 10.0;
  }
  if (!(fa > 0.0 && fb <= 0.0)) return theta;

  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double c = (fa == fb) ? 0.5 * (a + b) : (a * fb - b * fa) / (fb - fa);
    const double x = (c > a && c < b) ? c : 0.5 * (a + b);
    const double fx = excess(x);
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0) {
      a = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    } else {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    }
    if (b - a <= 1e-15 * std::abs(b)) break;
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

}  // namespace detail

inline SolutionReport solve(const SolverContext& ctx) {
  const auto& sys = ctx.system;
  const auto& prof = ctx.profiles;
  const double alpha = sys.budget;
  const double tie = sys.tie_tol;
  const double flat_tol = sys.flat_tolerance();
  const double budget_slack = tie * sys.total_measure();

  const LocalShape local = classify(ctx);
  SolutionReport rep;
  rep.shape = local.shape;
  rep.threshold = local.value;
  rep.level_gt = local.level_gt;
  rep.level_ge = local.level_ge;
  rep.optimal_cost = cum_integral(ctx.rearranged, alpha);
  rep.unique = local.shape != Shape::kFlat;
  rep.flat_interval = local.flat();

  // Strict set at `level` plus a left fill of whatever budget it leaves.
  const auto strict_and_fill = [&](double level) {
    const Schedule base = threshold_schedule(prof, level, true, tie);
    const double free = std::max(0.0, alpha - budget(base));
    return fill_flat(prof, level, free, tie, flat_tol);
  };

  if (local.shape == Shape::kFlat || local.shape == Shape::kStrictLeft) {
    rep.canonical = strict_and_fill(local.value);
  } else {
    const double theta = detail::fit_threshold(prof, alpha, tie);
    Schedule s = threshold_schedule(prof, theta, false, tie);
    if (std::abs(budget(s) - alpha) > budget_slack) {
      s = strict_and_fill(theta);
    }
    rep.canonical = std::move(s);
  }

  if (local.shape == Shape::kFlat) {
    FlatDof dof;
    for (const auto& list : detail::level_sets(prof, local.value, tie)) {
      dof.level_sets.push_back(detail::measure_of(list));
    }
    const Schedule base = threshold_schedule(prof, local.value, true, tie);
    dof.free_measure = alpha - budget(base);
    rep.flat_dof = std::move(dof);
  }
  return rep;
}

inline SolutionReport solve(const LtiSystem& sys, int threads = 1) {
  return solve(SolverContext(sys, threads));
}

}  // namespace actsched

#endif  // ACTSCHED_SCHEDULER_HPP
