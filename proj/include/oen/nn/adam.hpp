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

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "oen/nn/dense.hpp"

namespace oen::nn {

struct AdamOptions {
  double learning_rate = 0.00025;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one Network, shaped like its layers.
struct AdamState {
  AdamOptions options;
  Gradients first_moment;
  Gradients second_moment;
  std::int64_t timestep = 0;
};

inline AdamState make_adam_state(const Network& net, AdamOptions options = {}) {
  return {options, zero_gradients(net), zero_gradients(net), 0};
}

/// One bias-corrected Adam update. Throws before touching anything if a
/// gradient entry is non-finite or shapes disagree.
inline void adam_step(Network& net, const Gradients& grads, AdamState& state) {
  if (grads.size() != net.layers.size() || state.first_moment.size() != net.layers.size())
    throw std::invalid_argument("adam_step: gradient/state layer count does not match network");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const auto& l = net.layers[i];
    if (grads[i].weights.rows() != l.weights.rows() || grads[i].weights.cols() != l.weights.cols() ||
        grads[i].biases.size() != l.biases.size())
      throw std::invalid_argument("adam_step: gradient shape mismatch at layer " + std::to_string(i));
  }
  if (!all_finite(grads)) throw std::domain_error("adam_step: non-finite gradient");

  const auto& o = state.options;
  state.timestep += 1;
  const double t = static_cast<double>(state.timestep);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    param.array() -= o.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + o.epsilon);
  };
  for (std::size_t i = 0; i < grads.size(); ++i) {
    update(net.layers[i].weights, grads[i].weights, state.first_moment[i].weights, state.second_moment[i].weights);
    update(net.layers[i].biases, grads[i].biases, state.first_moment[i].biases, state.second_moment[i].biases);
  }
}

}  // namespace oen::nn
