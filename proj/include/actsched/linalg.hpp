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
#ifndef ACTSCHED_LINALG_HPP
#define ACTSCHED_LINALG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "actsched/error.hpp"

namespace actsched {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Uniform grid of `cells + 1` nodes on [start, end].
struct UniformGrid {
  double start = 0.0;
  double end = 1.0;
  int cells = 1;

  double width() const { return (end - start) / static_cast<double>(cells); }
  double node(int k) const {
    // Exact at both ends regardless of rounding in width().
    if (k == cells) return end;
    return start + width() * static_cast<double>(k);
  }
  int nodes() const { return cells + 1; }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace detail {

inline double norm1(const Matrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade coefficients and the backward-error thresholds theta_m for degrees
// 3, 5, 7, 9, 13 (Higham, 2005).
inline constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
inline constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0,
                                                 420.0,   30.0,    1.0};
inline constexpr std::array<double, 8> kPade7 = {
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
inline constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

inline constexpr double kTheta3 = 1.495585217958292e-2;
inline constexpr double kTheta5 = 2.539398330063230e-1;
inline constexpr double kTheta7 = 9.504178996162932e-1;
inline constexpr double kTheta9 = 2.097847961257068e0;
inline constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low_degree(const Matrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix u_even = b[1] * ident;
  Matrix v = b[0] * ident;
  Matrix power = ident;
  for (std::size_t j = 2; j < N; j += 2) {
    power = power * a2;
    v += b[j] * power;
    if (j + 1 < N) u_even += b[j + 1] * power;
  }
  const Matrix u = a * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

inline Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                        b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// e^{A t} by scaling and squaring with a diagonal Pade approximant.
///
/// Degree is chosen from the 1-norm of A·t; degree 13 with squaring covers
/// everything past theta_13.
inline Matrix mat_exp(const Matrix& a, double t) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "mat_exp requires a square matrix");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "mat_exp requires finite t >= 0");
  }
  const Matrix at = a * t;
  if (!all_finite(at)) {
    throw Error(ErrorKind::kNonFinite, "A*t has non-finite entries");
  }
  const auto n = a.rows();
  if (n == 0) return Matrix(0, 0);

  const double norm = detail::norm1(at);
  Matrix result;
  if (norm <= detail::kTheta3) {
    result = detail::pade_low_degree(at, detail::kPade3);
  } else if (norm <= detail::kTheta5) {
    result = detail::pade_low_degree(at, detail::kPade5);
  } else if (norm <= detail::kTheta7) {
    result = detail::pade_low_degree(at, detail::kPade7);
  } else if (norm <= detail::kTheta9) {
    result = detail::pade_low_degree(at, detail::kPade9);
  } else {
    int squarings = 0;
    if (norm > detail::kTheta13) {
      squarings = static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13)));
    }
    const Matrix scaled = at / std::ldexp(1.0, squarings);
    result = detail::pade13(scaled);
    for (int s = 0; s < squarings; ++s) result = result * result;
  }
  if (!all_finite(result)) {
    throw Error(ErrorKind::kNonFinite, "matrix exponential overflowed");
  }
  return result;
}

/// y_k = e^{A t_k} b on every node of `grid`, from one step matrix.
inline std::vector<Vector> propagate(const Matrix& a, const Vector& b,
                                     const UniformGrid& grid) {
  if (grid.cells < 1) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least one cell");
  }
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw Error(ErrorKind::kInvalidArgument, "propagate: dimension mismatch");
  }
  const Matrix step = mat_exp(a, grid.width());
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(grid.nodes()));
  states.push_back(b);
  for (int k = 1; k < grid.nodes(); ++k) {
    states.push_back(step * states.back());
    if (!states.back().allFinite()) {
      throw Error(ErrorKind::kNonFinite, "state propagation overflowed");
    }
  }
  return states;
}

/// Composite trapezoidal rule over uniformly spaced samples.
inline double integrate_samples(std::span<const double> values,
                                double cell_width) {
  if (values.empty() || !(cell_width > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "integrate_samples needs samples and a positive width");
  }
  if (values.size() == 1) return 0.0;
  double interior = 0.0;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) interior += values[k];
  const double total =
      cell_width * (0.5 * (values.front() + values.back()) + interior);
  if (!std::isfinite(total)) {
    throw Error(ErrorKind::kNonFinite, "integral is not finite");
  }
  return total;
}

}  // namespace actsched

#endif  // ACTSCHED_LINALG_HPP
