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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oen/nn/adam.hpp"

namespace {

using oen::nn::Matrix;

// One scalar parameter w, linear layer without bias gradient.
oen::nn::Network scalar_net(double w) {
  oen::nn::Network net;
  Matrix m(1, 1);
  m << w;
  net.layers.push_back({m, Eigen::VectorXd::Zero(1), oen::nn::Activation::kLinear});
  return net;
}

oen::nn::Gradients scalar_grad(const oen::nn::Network& net, double g) {
  auto grads = oen::nn::zero_gradients(net);
  grads[0].weights(0, 0) = g;
  return grads;
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto net = scalar_net(0.3);
  auto state = oen::nn::make_adam_state(net);
  oen::nn::adam_step(net, scalar_grad(net, 1.0), state);
  EXPECT_LT(std::abs((net.layers[0].weights(0, 0) - 0.3) + 0.00025), 1e-9);
  EXPECT_EQ(state.timestep, 1);
}

TEST(Adam, ZeroGradientIsIdentity) {
  auto net = oen::nn::init_params({3, 4, 2}, 7);
  const auto before = net;
  auto state = oen::nn::make_adam_state(net);
  for (int i = 0; i < 10; ++i) oen::nn::adam_step(net, oen::nn::zero_gradients(net), state);
  EXPECT_TRUE(net == before);
  EXPECT_EQ(state.timestep, 10);
}

TEST(Adam, DescendsOnSquare) {
  auto net = scalar_net(1.0);
  oen::nn::AdamOptions opts;
  opts.learning_rate = 0.1;
  auto state = oen::nn::make_adam_state(net, opts);
  double prev = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double w = net.layers[0].weights(0, 0);
    oen::nn::adam_step(net, scalar_grad(net, 2.0 * w), state);
    const double now = std::abs(net.layers[0].weights(0, 0));
    if (i < 10) {
      EXPECT_LT(now, prev) << "step " << i;
    }
    prev = now;
  }
  EXPECT_LT(prev, 0.01);
}

// Momentum carries w past 0 at step 11 and it oscillates with a decaying
// envelope from there, so strict monotonicity only holds for the first 10
// steps. Bounded by the start throughout.
TEST(Adam, NeverExceedsStartOnSquare) {
  auto net = scalar_net(1.0);
  oen::nn::AdamOptions opts;
  opts.learning_rate = 0.1;
  auto state = oen::nn::make_adam_state(net, opts);
  for (int i = 0; i < 100; ++i) {
    oen::nn::adam_step(net, scalar_grad(net, 2.0 * net.layers[0].weights(0, 0)), state);
    EXPECT_LT(std::abs(net.layers[0].weights(0, 0)), 1.0);
  }
}

TEST(Adam, SecondMomentNonNegative) {
  auto net = oen::nn::init_params({2, 3}, 1);
  auto state = oen::nn::make_adam_state(net);
  auto g = oen::nn::zero_gradients(net);
  g[0].weights.setConstant(-4.0);
  oen::nn::adam_step(net, g, state);
  EXPECT_GE(state.second_moment[0].weights.minCoeff(), 0.0);
}

TEST(Adam, RejectsNonFiniteGradientWithoutTouchingState) {
  auto net = oen::nn::init_params({2, 3}, 1);
  const auto before = net;
  auto state = oen::nn::make_adam_state(net);
  auto g = oen::nn::zero_gradients(net);
  g[0].weights(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(oen::nn::adam_step(net, g, state), std::domain_error);
  EXPECT_TRUE(net == before);
  EXPECT_EQ(state.timestep, 0);
}

TEST(Adam, RejectsShapeMismatch) {
  auto net = oen::nn::init_params({2, 3}, 1);
  auto state = oen::nn::make_adam_state(net);
  const auto other = oen::nn::zero_gradients(oen::nn::init_params({2, 4}, 1));
  EXPECT_THROW(oen::nn::adam_step(net, other, state), std::invalid_argument);
}

}  // namespace
