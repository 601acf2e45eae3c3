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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "oen/nn/dense.hpp"

namespace oen::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t parameters = 0;
  // Same comparison with the floor raised to 1e-4 * max |analytic|: entries
  // far below the network's gradient scale are compared on that scale, where
  // the finite-difference roundoff (~eps / h relative to the loss) stays small.
  double max_scaled_error = 0.0;
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

/// Compares `analytic` (flattened in for_each_parameter order) against central
/// differences of `loss()` taken by perturbing each parameter of `params` in place.
template <class Params, class LossFn>
GradCheckResult finite_diff_check(Params& params, std::span<const double> analytic, LossFn&& loss,
                                  double h = 1e-5) {
  GradCheckResult result;
  double scale = 0.0;
  for (double a : analytic) scale = std::max(scale, std::abs(a));
  const double scaled_floor = std::max(1e-4 * scale, 1e-8);
  std::size_t index = 0;
  for_each_parameter(params, [&](double& p) {
    if (index >= analytic.size()) throw std::invalid_argument("finite_diff_check: analytic gradient too short");
    const double saved = p;
    p = saved + h;
    const double plus = loss();
    p = saved - h;
    const double minus = loss();
    p = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double err = relative_error(analytic[index], numeric);
    const double scaled =
        std::abs(analytic[index] - numeric) / std::max({std::abs(analytic[index]), std::abs(numeric), scaled_floor});
    result.max_scaled_error = std::max(result.max_scaled_error, scaled);
    if (index == 0 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = index;
      result.worst_analytic = analytic[index];
      result.worst_numeric = numeric;
    }
    ++index;
  });
  if (index != analytic.size()) throw std::invalid_argument("finite_diff_check: analytic gradient size mismatch");
  result.parameters = index;
  return result;
}

template <class Grads>
std::vector<double> flatten(const Grads& grads) {
  std::vector<double> flat;
  for_each_parameter(grads, [&](double g) { flat.push_back(g); });
  return flat;
}

/// 0.5 * sum of squared residuals against a fixed target.
struct SquaredErrorLoss {
  Matrix target;
  double value(const Matrix& out) const { return 0.5 * (out - target).squaredNorm(); }
  Matrix gradient(const Matrix& out) const { return out - target; }
};

/// sum(coefficients .* output); a generic linear probe of the output.
struct LinearProbeLoss {
  Matrix coefficients;
  double value(const Matrix& out) const { return out.cwiseProduct(coefficients).sum(); }
  Matrix gradient(const Matrix&) const { return coefficients; }
};

/// Gradient check of a plain dense stack on `input` under `loss`.
template <class Loss>
GradCheckResult finite_diff_check(Network& net, const Matrix& input, const Loss& loss, double h = 1e-5) {
  ForwardRecord record;
  const Matrix out = forward(net, input, record);
  Gradients grads = zero_gradients(net);
  backprop(net, record, loss.gradient(out), grads);
  const std::vector<double> analytic = flatten(grads);
  return finite_diff_check(net, std::span<const double>(analytic),
                           [&] { return loss.value(forward(net, input)); }, h);
}

}  // namespace oen::nn
