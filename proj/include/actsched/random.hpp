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
#ifndef ACTSCHED_RANDOM_HPP
#define ACTSCHED_RANDOM_HPP

// Seeded generators for property checks (used by `verify` and the tests).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "actsched/gramian.hpp"

namespace actsched {

using Rng = std::mt19937_64;

struct RandomSystemOptions {
  int max_states = 6;
  int max_actuators = 4;
  int cells = 4096;
  // Spectral shift of A is drawn from [min_shift, max_shift]; positive values
  // give unstable systems.
  double min_shift = -1.0;
  double max_shift = 0.5;
};

/// Dense random A and B: generic instances whose profiles are non-constant.
inline LtiSystem random_system(Rng& rng, const RandomSystemOptions& opt = {}) {
  std::uniform_int_distribution<int> n_dist(1, opt.max_states);
  std::uniform_int_distribution<int> m_dist(1, opt.max_actuators);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = n_dist(rng);
  const int m = m_dist(rng);
  LtiSystem sys;
  sys.a = Matrix(n, n);
  sys.b = Matrix(n, m);
  const double shift = opt.min_shift + (opt.max_shift - opt.min_shift) * unit(rng);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) sys.a(r, c) = normal(rng) / std::sqrt(static_cast<double>(n));
    sys.a(r, r) += shift;
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) sys.b(r, c) = normal(rng);
  }
  sys.horizon = 0.5 + 1.5 * unit(rng);
  sys.budget = (0.1 + 0.8 * unit(rng)) * sys.total_measure();
  sys.cells = opt.cells;
  return sys;
}

/// Random nonnegative profile on [0, 1] with `cells` cells. Mixes smooth
/// trigonometric shapes with step functions that have long flat stretches.
inline SampledProfile random_profile(Rng& rng, int cells) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> kind_dist(0, 2);
  const int kind = kind_dist(rng);
  std::vector<double> nodes(static_cast<std::size_t>(cells) + 1);

  if (kind == 0 || kind == 2) {
    const int terms = 1 + static_cast<int>(4 * unit(rng));
    std::vector<double> amp(static_cast<std::size_t>(terms)), freq(amp.size()),
        phase(amp.size());
    for (int j = 0; j < terms; ++j) {
      amp[static_cast<std::size_t>(j)] = unit(rng);
      freq[static_cast<std::size_t>(j)] = 1.0 + 8.0 * unit(rng);
      phase[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * unit(rng);
    }
    double total_amp = 0.0;
    for (double a : amp) total_amp += a;
    const double offset = total_amp * (1.0 + unit(rng));
    for (int k = 0; k <= cells; ++k) {
      const double x = static_cast<double>(k) / cells;
      double v = offset;
      for (std::size_t j = 0; j < amp.size(); ++j) {
        v += amp[j] * std::sin(2.0 * std::numbers::pi * freq[j] * x + phase[j]);
      }
      nodes[static_cast<std::size_t>(k)] = std::max(v, 0.0);
    }
  }
  if (kind == 1 || kind == 2) {
    // Piecewise constant over node runs; run boundaries are shared by the
    // two nodes of a cell so every cell mean is one of the levels.
    const int levels = 2 + static_cast<int>(5 * unit(rng));
    std::vector<double> level_values(static_cast<std::size_t>(levels));
    for (auto& v : level_values) v = std::round(8.0 * unit(rng)) / 4.0;
    std::uniform_int_distribution<int> pick(0, levels - 1);
    int k = 0;
    double current = level_values[static_cast<std::size_t>(pick(rng))];
    while (k <= cells) {
      const int run = 1 + static_cast<int>((cells / 4) * unit(rng));
      for (int j = 0; j < run && k <= cells; ++j, ++k) {
        const double base = kind == 2 ? nodes[static_cast<std::size_t>(k)] : 0.0;
        nodes[static_cast<std::size_t>(k)] = kind == 2 ? std::max(base, current) : current;
      }
      current = level_values[static_cast<std::size_t>(pick(rng))];
    }
  }
  return SampledProfile::from_values(0.0, 1.0, std::move(nodes));
}

/// A pair (f, g) on a shared grid. Some pairs satisfy f <= g, some are
/// bounded by one, so the conditional checks get exercised.
inline std::pair<SampledProfile, SampledProfile> random_profile_pair(Rng& rng, int cells) {
  std::uniform_int_distribution<int> mode_dist(0, 3);
  auto f = random_profile(rng, cells);
  auto g = random_profile(rng, cells);
  switch (mode_dist(rng)) {
    case 1:
      for (std::size_t k = 0; k < g.pieces[0].size(); ++k) {
        g.pieces[0][k] = f.pieces[0][k] + g.pieces[0][k];
      }
      break;
    case 2: {
      const double top = std::max(f.max_value(), 1e-12);
      for (auto& v : f.pieces[0]) v = std::min(v / top, 1.0);
      break;
    }
    default:
      break;
  }
  return {std::move(f), std::move(g)};
}

}  // namespace actsched

#endif  // ACTSCHED_RANDOM_HPP
