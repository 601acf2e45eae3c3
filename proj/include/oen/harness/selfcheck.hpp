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
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "oen/agent/models.hpp"
#include "oen/harness/savgol.hpp"
#include "oen/nn/gradcheck.hpp"
#include "oen/observe/observe.hpp"
#include "oen/rng.hpp"
#include "oen/setnet/oen.hpp"

// Property suites behind `oen check`. These are quick smoke versions of the
// acceptance properties, sized to finish in a few seconds.

namespace oen::harness {

using nn::Index;
using nn::Matrix;

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst observed deviation
  double tolerance = 0.0;
};

namespace check_detail {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

inline setnet::OenConfig small_config() {
  setnet::OenConfig c;
  c.embedding_widths = {16, 16};
  c.head_widths = {16};
  return c;
}

inline Index pick(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

}  // namespace check_detail

inline SuiteResult check_permutation(int cases, std::uint64_t seed) {
  using namespace check_detail;
  SuiteResult r{"permutation invariance", true, 0.0, 1e-9};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const Index k = pick(rng, 1, 32), d = pick(rng, 3, 12), m = pick(rng, 2, 6);
    const auto params = setnet::make_oen_params(d, m, rng.next(), small_config());
    const Matrix x = random_matrix(k, d, rng);
    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    Matrix xp(k, d);
    for (Index i = 0; i < k; ++i) xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    const Matrix q1 = setnet::oen_forward(observe::pad_batch(std::vector<Matrix>{x}), params);
    const Matrix q2 = setnet::oen_forward(observe::pad_batch(std::vector<Matrix>{xp}), params);
    r.worst = std::max(r.worst, (q1 - q2).cwiseAbs().maxCoeff());
  }
  r.passed = r.worst <= r.tolerance;
  return r;
}

inline SuiteResult check_padding(int cases, std::uint64_t seed) {
  using namespace check_detail;
  SuiteResult r{"padding invariance", true, 0.0, 1e-12};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const Index k = pick(rng, 1, 16), d = pick(rng, 3, 12), m = pick(rng, 2, 6), pad = pick(rng, 1, 8);
    const auto params = setnet::make_oen_params(d, m, rng.next(), small_config());
    setnet::FeatureSetBatch tight{{k, {k}}, random_matrix(k, d, rng)};
    setnet::FeatureSetBatch padded{{k + pad, {k}}, Matrix::Zero(k + pad, d)};
    padded.data.topRows(k) = tight.data;
    const Matrix diff = setnet::oen_forward(tight, params) - setnet::oen_forward(padded, params);
    r.worst = std::max(r.worst, diff.cwiseAbs().maxCoeff());
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

inline SuiteResult check_batched(int batches, std::uint64_t seed) {
  using namespace check_detail;
  SuiteResult r{"batched vs unbatched", true, 0.0, 1e-12};
  Rng rng(seed);
  for (int c = 0; c < batches; ++c) {
    const Index d = pick(rng, 3, 8), m = pick(rng, 2, 6), n = pick(rng, 1, 8);
    const auto params = setnet::make_oen_params(d, m, rng.next(), small_config());
    std::vector<Matrix> sets;
    for (Index b = 0; b < n; ++b) sets.push_back(random_matrix(pick(rng, 1, 10), d, rng));
    const Matrix q = setnet::oen_forward(observe::pad_batch(sets), params);
    for (Index b = 0; b < n; ++b) {
      const Matrix qb = setnet::oen_forward(observe::pad_batch(std::vector<Matrix>{sets[static_cast<std::size_t>(b)]}), params);
      r.worst = std::max(r.worst, (q.row(b) - qb.row(0)).cwiseAbs().maxCoeff());
    }
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

// K=4 objects against central differences of a linear probe. Narrow layers and
// nonzero biases keep the deep relu stack out of its vanishing-gradient regime;
// the scaled error ignores entries far below the gradient scale. One relu kink
// inside the stencil can spoil a draw, so the median of five draws is reported.
inline SuiteResult check_oen_gradients(std::uint64_t seed) {
  using namespace check_detail;
  SuiteResult r{"gradient check (object embedding network)", true, 0.0, 1e-5};
  Rng rng(seed);
  setnet::OenConfig cfg;
  cfg.embedding_widths = {12, 12, 12, 12};
  cfg.head_widths = {12, 12, 12};
  std::vector<double> errors;
  for (int draw = 0; draw < 5; ++draw) {
    auto params = setnet::make_oen_params(5, 4, rng.next(), cfg);
    for (auto* net : {&params.embedding, &params.head})
      for (auto& l : net->layers)
        for (Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.1 * rng.normal();
    const auto batch = observe::pad_batch(std::vector<Matrix>{random_matrix(4, 5, rng)});
    const Matrix coef = random_matrix(1, 4, rng);
    setnet::OenForwardRecord record;
    setnet::oen_forward(batch, params, record);
    auto grads = setnet::zero_gradients(params);
    setnet::oen_backward(params, record, coef, grads);
    const auto analytic = nn::flatten(grads);
    errors.push_back(nn::finite_diff_check(params, std::span<const double>(analytic), [&] {
                       return setnet::oen_forward(batch, params).cwiseProduct(coef).sum();
                     }).max_scaled_error);
  }
  std::nth_element(errors.begin(), errors.begin() + 2, errors.end());
  r.worst = errors[2];
  r.passed = r.worst < r.tolerance;
  return r;
}

inline SuiteResult check_mlp_gradients(std::uint64_t seed) {
  using namespace check_detail;
  SuiteResult r{"gradient check (features MLP)", true, 0.0, 1e-5};
  Rng rng(seed);
  auto net = agent::build_baseline_mlp(6, 5, rng.next(), false, 0.1);
  const Matrix input = random_matrix(3, 6, rng, 2.0);
  const auto res = nn::finite_diff_check(net, input, nn::LinearProbeLoss{random_matrix(3, 5, rng)});
  r.worst = res.max_relative_error;
  r.passed = r.worst < r.tolerance;
  return r;
}

inline SuiteResult check_savgol(std::uint64_t seed) {
  SuiteResult r{"savitzky-golay polynomial reproduction", true, 0.0, 1e-9};
  Rng rng(seed);
  for (int c = 0; c < 20; ++c) {
    double coef[5];
    for (double& a : coef) a = rng.normal();
    std::vector<double> series(60);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = static_cast<double>(i) / 10.0;
      series[i] = coef[0] + t * (coef[1] + t * (coef[2] + t * (coef[3] + t * coef[4])));
    }
    const auto smooth = savgol_smooth(series, 21, 4);
    for (std::size_t i = 0; i < series.size(); ++i)
      r.worst = std::max(r.worst, std::abs(smooth[i] - series[i]) / std::max(1.0, std::abs(series[i])));
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

inline std::vector<SuiteResult> run_self_check(std::uint64_t seed = 20240601) {
  return {check_permutation(200, derive_seed(seed, 1)), check_padding(200, derive_seed(seed, 2)),
          check_batched(50, derive_seed(seed, 3)),      check_oen_gradients(derive_seed(seed, 4)),
          check_mlp_gradients(derive_seed(seed, 5)),    check_savgol(derive_seed(seed, 6))};
}

}  // namespace oen::harness
