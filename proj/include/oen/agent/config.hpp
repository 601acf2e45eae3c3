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
#include <stdexcept>
#include <string>

namespace oen::agent {

enum class AgentKind { kOen, kFeatures };

inline const char* to_string(AgentKind k) { return k == AgentKind::kOen ? "oen" : "features"; }

inline AgentKind parse_agent_kind(const std::string& s) {
  if (s == "oen" || s == "objects") return AgentKind::kOen;
  if (s == "features" || s == "features-mlp") return AgentKind::kFeatures;
  throw std::invalid_argument("unknown agent kind '" + s + "' (expected oen or features)");
}

/// Which transitions bootstrap from the target network.
enum class BootstrapRule {
  kNonTerminal,      // r + gamma * max Q' unless the episode ended
  kLiteralTerminal,  // multiply by the terminal flag, as written in the pseudocode listing
};

struct AgentConfig {
  double gamma = 0.99;
  double epsilon_start = 0.5;
  double epsilon_final = 0.1;
  std::int64_t epsilon_anneal_steps = 500'000;
  double learning_rate = 0.00025;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 32;
  std::int64_t train_every = 4;
  std::int64_t target_sync_every = 1000;
  std::int64_t replay_capacity = 50'000;
  std::int64_t learn_start = 1000;
  std::int64_t max_steps = 2'000'000;
  double init_stddev = 0.1;
  double eval_epsilon = 0.0;

  BootstrapRule bootstrap = BootstrapRule::kNonTerminal;
  bool timeout_is_terminal = false;    // cut the Bellman backup at the episode horizon
  bool baseline_relu_output = false;   // relu on the baseline MLP's output layer
  bool normalize_coordinates = false;  // x / width, y / height in object features
  bool transform_inputs = true;        // equivariant transform before the first embedding layer

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("agent config: " + m); };
    if (!(epsilon_final >= 0.0 && epsilon_final <= epsilon_start && epsilon_start <= 1.0))
      fail("need 0 <= epsilon_final <= epsilon_start <= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must be in [0, 1)");
    if (epsilon_anneal_steps < 0) fail("epsilon_anneal_steps must be >= 0");
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (train_every < 1 || target_sync_every < 1) fail("train_every and target_sync_every must be >= 1");
    if (replay_capacity < batch_size) fail("replay_capacity must be >= batch_size");
    if (learn_start < batch_size) fail("learn_start must be >= batch_size");
    if (max_steps < 0) fail("max_steps must be >= 0");
    if (!(eval_epsilon >= 0.0 && eval_epsilon <= 1.0)) fail("eval_epsilon must be in [0, 1]");
  }
};

/// Linear anneal from epsilon_start at step 0 to epsilon_final at
/// epsilon_anneal_steps, constant afterwards.
inline double epsilon_schedule(std::int64_t step, const AgentConfig& c) {
  if (step < 0) throw std::invalid_argument("epsilon_schedule: negative step");
  if (c.epsilon_anneal_steps == 0 || step >= c.epsilon_anneal_steps) return c.epsilon_final;
  const double frac = static_cast<double>(step) / static_cast<double>(c.epsilon_anneal_steps);
  return c.epsilon_start + (c.epsilon_final - c.epsilon_start) * frac;
}

}  // namespace oen::agent
