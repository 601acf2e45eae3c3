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

#include <cstdint>
#include <span>
#include <vector>

#include "oen/agent/config.hpp"
#include "oen/game/engine.hpp"
#include "oen/nn/adam.hpp"
#include "oen/nn/dense.hpp"
#include "oen/observe/observe.hpp"
#include "oen/setnet/oen.hpp"

namespace oen::agent {

using nn::Index;
using nn::Matrix;

/// Feature-baseline Q-network: 64, 64, 128 relu units then M outputs.
inline nn::Network build_baseline_mlp(Index input_dim, Index action_count, std::uint64_t seed,
                                      bool relu_output = false, double stddev = 0.1) {
  if (input_dim < 1) throw std::invalid_argument("build_baseline_mlp: input_dim must be >= 1");
  const Index dims[] = {input_dim, 64, 64, 128, action_count};
  return nn::init_params(std::span<const Index>(dims), seed, nn::Activation::kRelu,
                         relu_output ? nn::Activation::kRelu : nn::Activation::kLinear, stddev);
}

// A model couples an observation encoding with a parameterised Q-function.
// Both models below expose the same members so DqnAgent can be generic.

/// Object representation + object embedding network.
struct OenModel {
  using Observation = Matrix;  // K x d, one row per relevant object
  using Params = setnet::OenParams;
  using Gradients = setnet::OenGradients;
  using Optimizer = setnet::OenAdamState;
  using Record = setnet::OenForwardRecord;

  observe::ClassRegistry registry;
  int action_count = 0;
  setnet::OenConfig net_config;

  OenModel(const game::GameSpec& spec, const AgentConfig& config)
      : registry(observe::ClassRegistry::from_game(spec, config.normalize_coordinates)),
        action_count(spec.action_count()) {
    net_config.transform_inputs = config.transform_inputs;
    net_config.init_stddev = config.init_stddev;
  }

  bool encodable(const game::ObjectList& objects) const {
    for (const auto& o : objects)
      if (registry.index_of(o.class_id) >= 0) return true;
    return false;
  }
  Observation encode(const game::ObjectList& objects) const {
    return observe::process_observation(objects, registry);
  }

  Params init(std::uint64_t seed) const {
    return setnet::make_oen_params(registry.feature_dim(), action_count, seed, net_config);
  }
  static Optimizer make_optimizer(const Params& p, const nn::AdamOptions& o) { return setnet::make_adam_state(p, o); }
  static Gradients zero_gradients(const Params& p) { return setnet::zero_gradients(p); }

  static Matrix q_values(const Params& p, std::span<const Observation* const> obs) {
    return setnet::oen_forward(observe::pad_batch(obs), p);
  }
  static Matrix q_values(const Params& p, std::span<const Observation* const> obs, Record& record) {
    return setnet::oen_forward(observe::pad_batch(obs), p, record);
  }
  static void backward(const Params& p, const Record& record, const Matrix& grad_q, Gradients& grads) {
    setnet::oen_backward(p, record, grad_q, grads);
  }
  static void apply(Params& p, const Gradients& g, Optimizer& opt) { setnet::adam_step(p, g, opt); }
};

/// Feature representation + fully connected network.
struct FeaturesModel {
  using Observation = Eigen::VectorXd;
  using Params = nn::Network;
  using Gradients = nn::Gradients;
  using Optimizer = nn::AdamState;
  using Record = nn::ForwardRecord;

  observe::ClassRegistry registry;
  int action_count = 0;
  bool relu_output = false;
  double init_stddev = 0.1;

  FeaturesModel(const game::GameSpec& spec, const AgentConfig& config)
      : registry(observe::ClassRegistry::from_game(spec, config.normalize_coordinates)),
        action_count(spec.action_count()),
        relu_output(config.baseline_relu_output),
        init_stddev(config.init_stddev) {}

  bool encodable(const game::ObjectList& objects) const {
    for (const auto& o : objects)
      if (o.is_avatar) return true;
    return false;
  }
  Observation encode(const game::ObjectList& objects) const {
    return observe::extract_features_baseline(objects, registry);
  }

  Params init(std::uint64_t seed) const {
    return build_baseline_mlp(registry.baseline_dim(), action_count, seed, relu_output, init_stddev);
  }
  static Optimizer make_optimizer(const Params& p, const nn::AdamOptions& o) { return nn::make_adam_state(p, o); }
  static Gradients zero_gradients(const Params& p) { return nn::zero_gradients(p); }

  static Matrix stack(std::span<const Observation* const> obs) {
    Matrix m(static_cast<Index>(obs.size()), obs.front()->size());
    for (std::size_t i = 0; i < obs.size(); ++i) m.row(static_cast<Index>(i)) = obs[i]->transpose();
    return m;
  }
  static Matrix q_values(const Params& p, std::span<const Observation* const> obs) {
    return nn::forward(p, stack(obs));
  }
  static Matrix q_values(const Params& p, std::span<const Observation* const> obs, Record& record) {
    return nn::forward(p, stack(obs), record);
  }
  static void backward(const Params& p, const Record& record, const Matrix& grad_q, Gradients& grads) {
    nn::backprop(p, record, grad_q, grads);
  }
  static void apply(Params& p, const Gradients& g, Optimizer& opt) { nn::adam_step(p, g, opt); }
};

}  // namespace oen::agent
