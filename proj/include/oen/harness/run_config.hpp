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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/agent/dqn.hpp"

namespace oen::harness {

/// A training run as described by a `.run` file plus command-line overrides.
struct RunConfig {
  std::string game_path;
  std::string out_dir = "run";
  agent::RunSettings settings;
};

namespace detail {

template <class T>
T convert(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw std::invalid_argument("config: bad value '" + value + "' for " + key);
  return v;
}

template <>
inline bool convert<bool>(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + value + "' for " + key);
}

using Setter = std::function<void(agent::RunSettings&, const std::string&)>;

template <class T>
Setter field(T agent::AgentConfig::*m, const std::string& key) {
  return [m, key](agent::RunSettings& s, const std::string& v) { s.config.*m = convert<T>(key, v); };
}

// "section.key" -> setter. Keys mirror AgentConfig member names.
inline const std::map<std::string, Setter>& setters() {
  using C = agent::AgentConfig;
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto add = [&](const std::string& k, Setter s) { t.emplace(k, std::move(s)); };
    add("agent.gamma", field(&C::gamma, "gamma"));
    add("agent.epsilon_start", field(&C::epsilon_start, "epsilon_start"));
    add("agent.epsilon_final", field(&C::epsilon_final, "epsilon_final"));
    add("agent.epsilon_anneal_steps", field(&C::epsilon_anneal_steps, "epsilon_anneal_steps"));
    add("agent.learning_rate", field(&C::learning_rate, "learning_rate"));
    add("agent.adam_beta1", field(&C::adam_beta1, "adam_beta1"));
    add("agent.adam_beta2", field(&C::adam_beta2, "adam_beta2"));
    add("agent.adam_epsilon", field(&C::adam_epsilon, "adam_epsilon"));
    add("agent.batch_size", field(&C::batch_size, "batch_size"));
    add("agent.train_every", field(&C::train_every, "train_every"));
    add("agent.target_sync_every", field(&C::target_sync_every, "target_sync_every"));
    add("agent.replay_capacity", field(&C::replay_capacity, "replay_capacity"));
    add("agent.learn_start", field(&C::learn_start, "learn_start"));
    add("agent.max_steps", field(&C::max_steps, "max_steps"));
    add("agent.init_stddev", field(&C::init_stddev, "init_stddev"));
    add("agent.eval_epsilon", field(&C::eval_epsilon, "eval_epsilon"));
    add("agent.timeout_is_terminal", field(&C::timeout_is_terminal, "timeout_is_terminal"));
    add("agent.baseline_relu_output", field(&C::baseline_relu_output, "baseline_relu_output"));
    add("agent.normalize_coordinates", field(&C::normalize_coordinates, "normalize_coordinates"));
    add("agent.transform_inputs", field(&C::transform_inputs, "transform_inputs"));
    add("agent.bootstrap", [](agent::RunSettings& s, const std::string& v) {
      if (v == "non_terminal")
        s.config.bootstrap = agent::BootstrapRule::kNonTerminal;
      else if (v == "literal_terminal")
        s.config.bootstrap = agent::BootstrapRule::kLiteralTerminal;
      else
        throw std::invalid_argument("config: bootstrap must be non_terminal or literal_terminal");
    });
    add("run.agent", [](agent::RunSettings& s, const std::string& v) { s.kind = agent::parse_agent_kind(v); });
    add("run.record_wall_time",
        [](agent::RunSettings& s, const std::string& v) { s.record_wall_time = convert<bool>("record_wall_time", v); });
    add("seeds.agent", [](agent::RunSettings& s, const std::string& v) { s.agent_seed = convert<std::uint64_t>("seeds.agent", v); });
    add("seeds.env", [](agent::RunSettings& s, const std::string& v) { s.env_seed = convert<std::uint64_t>("seeds.env", v); });
    add("seeds.eval", [](agent::RunSettings& s, const std::string& v) { s.eval_seed = convert<std::uint64_t>("seeds.eval", v); });
    add("eval.every", [](agent::RunSettings& s, const std::string& v) { s.eval_every = convert<std::int64_t>("eval.every", v); });
    add("eval.episodes", [](agent::RunSettings& s, const std::string& v) { s.eval_episodes = convert<int>("eval.episodes", v); });
    return t;
  }();
  return table;
}

}  // namespace detail

/// Parses an INI-style run file:
///   [run] game, agent, out, record_wall_time
///   [seeds] agent, env, eval
///   [eval] every, episodes
///   [agent] any AgentConfig field by name
/// Relative paths resolve against the run file's directory. All three seeds
/// must be given explicitly.
inline RunConfig parse_run_config(std::istream& is, const std::filesystem::path& base_dir = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig rc;
  bool seeds[3] = {false, false, false};
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const std::string value = node.get_value<std::string>();
      if (full == "run.game") {
        // "builtin:<name>" names a shipped game and is not a path.
        rc.game_path = value.rfind("builtin:", 0) == 0 ? value : (base_dir / value).lexically_normal().string();
      } else if (full == "run.out") {
        rc.out_dir = (base_dir / value).lexically_normal().string();
      } else {
        auto it = detail::setters().find(full);
        if (it == detail::setters().end()) throw std::invalid_argument("config: unknown key '" + full + "'");
        it->second(rc.settings, value);
        if (full == "seeds.agent") seeds[0] = true;
        if (full == "seeds.env") seeds[1] = true;
        if (full == "seeds.eval") seeds[2] = true;
      }
    }
  }
  if (!seeds[0] || !seeds[1] || !seeds[2])
    throw std::invalid_argument("config: [seeds] must set agent, env and eval explicitly");
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_run_config(is, std::filesystem::path(path).parent_path());
}

/// Every hyperparameter as "key = value", for the metrics provenance header.
inline std::vector<std::string> describe_settings(const agent::RunSettings& s) {
  const auto& c = s.config;
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const auto& v) {
    std::ostringstream os;
    os.precision(17);
    os << k << " = " << v;
    out.push_back(os.str());
  };
  add("agent", agent::to_string(s.kind));
  add("seeds.agent", s.agent_seed);
  add("seeds.env", s.env_seed);
  add("seeds.eval", s.eval_seed);
  add("eval.every", s.eval_every);
  add("eval.episodes", s.eval_episodes);
  add("gamma", c.gamma);
  add("epsilon_start", c.epsilon_start);
  add("epsilon_final", c.epsilon_final);
  add("epsilon_anneal_steps", c.epsilon_anneal_steps);
  add("learning_rate", c.learning_rate);
  add("adam_beta1", c.adam_beta1);
  add("adam_beta2", c.adam_beta2);
  add("adam_epsilon", c.adam_epsilon);
  add("batch_size", c.batch_size);
  add("train_every", c.train_every);
  add("target_sync_every", c.target_sync_every);
  add("replay_capacity", c.replay_capacity);
  add("learn_start", c.learn_start);
  add("max_steps", c.max_steps);
  add("init_stddev", c.init_stddev);
  add("eval_epsilon", c.eval_epsilon);
  add("bootstrap", c.bootstrap == agent::BootstrapRule::kNonTerminal ? "non_terminal" : "literal_terminal");
  add("timeout_is_terminal", c.timeout_is_terminal);
  add("baseline_relu_output", c.baseline_relu_output);
  add("normalize_coordinates", c.normalize_coordinates);
  add("transform_inputs", c.transform_inputs);
  return out;
}

}  // namespace oen::harness
