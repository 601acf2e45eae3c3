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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oen/agent/checkpoint.hpp"
#include "oen/agent/dqn.hpp"
#include "oen/agent/models.hpp"
#include "oen/game/builtin_games.hpp"
#include "oen/game/parser.hpp"
#include "oen/harness/metrics_csv.hpp"
#include "oen/harness/run_config.hpp"

namespace oen::harness {

namespace fs = std::filesystem;

/// Reads a game file, or falls back to a built-in game name ("collect", ...).
inline std::string load_game_source(const std::string& path_or_name) {
  if (path_or_name.empty()) throw std::invalid_argument("no game given");
  std::ifstream is(path_or_name, std::ios::binary);
  if (is) {
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  if (fs::path(path_or_name).filename() == path_or_name || path_or_name.rfind("builtin:", 0) == 0) {
    const std::string name = path_or_name.rfind("builtin:", 0) == 0 ? path_or_name.substr(8) : path_or_name;
    if (auto src = game::builtin::find(name)) return std::string(*src);
  }
  throw std::invalid_argument("game file not found: " + path_or_name);
}

template <class F>
decltype(auto) with_model(agent::AgentKind kind, F&& f) {
  if (kind == agent::AgentKind::kOen) return f(static_cast<agent::OenModel*>(nullptr));
  return f(static_cast<agent::FeaturesModel*>(nullptr));
}

inline std::string checkpoint_name(std::int64_t step) { return "checkpoint_step" + std::to_string(step) + ".bin"; }

inline std::vector<std::string> provenance(const std::string& game, const agent::RunSettings& s,
                                           std::int64_t max_steps) {
  std::vector<std::string> out{"oen training metrics", "game = " + game, "max_steps = " + std::to_string(max_steps)};
  for (auto& line : describe_settings(s)) out.push_back(std::move(line));
  return out;
}

template <class Model>
void save_checkpoint_file(const fs::path& path, const agent::TrainingSession<Model>& s, const std::string& source) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path.string());
    agent::save_checkpoint(os, s, source);
    os.flush();
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
  }
  fs::rename(tmp, path);
}

struct TrainOptions {
  std::optional<std::int64_t> max_steps;  // overrides config.max_steps
  std::string resume_from;                // checkpoint to continue from
  bool write_step_checkpoints = true;
  std::ostream* log = nullptr;
};

struct TrainSummary {
  std::int64_t steps = 0;
  std::int64_t episodes = 0;
  std::vector<agent::MetricsRow> rows;
  fs::path metrics_path;
  fs::path checkpoint_path;
};

/// Runs (or resumes) a training run and writes into rc.out_dir:
/// metrics.csv, checkpoint.bin and checkpoint_step<N>.bin at every eval.
inline TrainSummary run_training(const RunConfig& rc, const TrainOptions& opt = {}) {
  std::string source;
  agent::RunSettings settings = rc.settings;
  std::string game_label = rc.game_path;
  std::unique_ptr<std::istream> resume;
  std::optional<agent::CheckpointHeader> header;
  if (!opt.resume_from.empty()) {
    auto is = std::make_unique<std::ifstream>(opt.resume_from, std::ios::binary);
    if (!*is) throw std::invalid_argument("cannot open checkpoint: " + opt.resume_from);
    header = agent::read_checkpoint_header(*is);
    source = header->game_source;
    settings = header->settings;
    resume = std::move(is);
  } else {
    source = load_game_source(rc.game_path);
  }
  if (opt.max_steps) settings.config.max_steps = *opt.max_steps;
  settings.config.validate();
  const game::GameSpec spec = game::parse_game(source);

  fs::create_directories(rc.out_dir);
  const fs::path out(rc.out_dir);

  return with_model(settings.kind, [&](auto* tag) {
    using Model = std::remove_pointer_t<decltype(tag)>;
    std::unique_ptr<agent::TrainingSession<Model>> session;
    if (header) {
      session = agent::load_session<Model>(*resume, *header);
      session->set_max_steps(settings.config.max_steps);
    } else {
      session = std::make_unique<agent::TrainingSession<Model>>(spec, settings);
    }
    if (opt.write_step_checkpoints) {
      session->set_eval_hook([&](const agent::TrainingSession<Model>& s, const agent::EvalResult& ev) {
        save_checkpoint_file(out / checkpoint_name(s.step()), s, source);
        if (opt.log)
          *opt.log << "step " << s.step() << ": eval mean " << format_real(ev.mean()) << " over "
                   << ev.returns.size() << " episodes\n";
      });
    }
    session->run(session->settings().config.max_steps);

    TrainSummary summary;
    summary.steps = session->step();
    summary.episodes = session->episode();
    summary.rows = session->rows();
    summary.metrics_path = out / "metrics.csv";
    summary.checkpoint_path = out / "checkpoint.bin";
    save_checkpoint_file(summary.checkpoint_path, *session, source);
    write_metrics(summary.metrics_path.string(), summary.rows,
                  provenance(game_label.empty() ? spec.name : game_label, session->settings(),
                             settings.config.max_steps));
    return summary;
  });
}

struct EvalOptions {
  std::optional<int> episodes;
  std::optional<std::uint64_t> eval_seed;
};

/// Loads a checkpoint and evaluates its online network with the stored
/// eval seed and epsilon, unless overridden.
inline agent::EvalResult evaluate_checkpoint(const std::string& path, const EvalOptions& opt = {}) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open checkpoint: " + path);
  const agent::CheckpointHeader header = agent::read_checkpoint_header(is);
  return with_model(header.kind, [&](auto* tag) {
    using Model = std::remove_pointer_t<decltype(tag)>;
    auto session = agent::load_session<Model>(is, header);
    const auto& s = session->settings();
    return agent::evaluate(session->model(), session->nets().online, session->spec(),
                           opt.episodes.value_or(s.eval_episodes), opt.eval_seed.value_or(s.eval_seed),
                           s.config.eval_epsilon, session->eval_step_cap());
  });
}

/// Mean return of a uniform-random policy, the reference for learning checks.
/// Episode e resets with derive_seed(seed, e).
inline double random_policy_mean(const game::GameSpec& spec, int episodes, std::uint64_t seed,
                                 std::int64_t max_episode_steps = 100'000) {
  game::Environment env(spec);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    Rng rng(derive_seed(seed, (1ULL << 33) + static_cast<std::uint64_t>(e)));
    std::int64_t len = 0;
    while (!env.has_ended() && len < max_episode_steps) {
      total += env.step(static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.action_count())))).reward;
      ++len;
    }
  }
  return total / episodes;
}

}  // namespace oen::harness
