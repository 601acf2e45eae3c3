// Copyright 2026 The OEN Authors. All rights reserved.
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

#include <Eigen/Dense>

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oen::harness {

namespace detail {

// Weights w with w . y = value at offset 0 of the least-squares polynomial of
// degree `order` through samples at integer offsets [lo, hi] around the centre.
inline Eigen::RowVectorXd savgol_weights(int lo, int hi, int order) {
  const int m = hi - lo + 1;
  const int degree = std::min(order, m - 1);
  const double scale = std::max(1, std::max(-lo, hi));
  Eigen::MatrixXd v(m, degree + 1);
  for (int r = 0; r < m; ++r) {
    const double t = (lo + r) / scale;
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      v(r, c) = p;
      p *= t;
    }
  }
  return v.completeOrthogonalDecomposition().pseudoInverse().row(0);
}

}  // namespace detail

/// Savitzky-Golay smoothing: each point becomes the centre value of a
/// least-squares polynomial fit over its window. Near the ends the window is
/// truncated to the available samples and the fit redone on that
/// asymmetric window.
inline std::vector<double> savgol_smooth(std::span<const double> series, int window = 21, int order = 4) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("savgol: window must be a positive odd number");
  if (order < 0 || order >= window) throw std::invalid_argument("savgol: need 0 <= order < window");
  if (series.size() < static_cast<std::size_t>(window))
    throw std::invalid_argument("savgol: series has " + std::to_string(series.size()) + " points, need at least " +
                                std::to_string(window) + " (the window size)");
  const int n = static_cast<int>(series.size());
  const int half = window / 2;
  const Eigen::RowVectorXd interior = detail::savgol_weights(-half, half, order);
  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const Eigen::RowVectorXd w =
        (lo == i - half && hi == i + half) ? interior : detail::savgol_weights(lo - i, hi - i, order);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += w(j - lo) * series[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace oen::harness
