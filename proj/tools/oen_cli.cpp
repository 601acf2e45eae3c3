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

// oen: train, evaluate and report on object-embedding Q-learning agents.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "oen/harness/metrics_csv.hpp"
#include "oen/harness/run_config.hpp"
#include "oen/harness/runner.hpp"
#include "oen/harness/savgol.hpp"
#include "oen/harness/selfcheck.hpp"

namespace {

using namespace oen;

struct TrainArgs {
  std::string config, game, agent, out, checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_steps;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  harness::RunConfig rc;
  if (!a.config.empty()) {
    rc = harness::load_run_config(a.config);
  } else if (a.checkpoint.empty()) {
    if (a.game.empty()) throw std::invalid_argument("train: need --config or --game");
    if (!a.seed) throw std::invalid_argument("train: --seed is required without --config");
  }
  if (!a.game.empty()) rc.game_path = a.game;
  if (!a.agent.empty()) rc.settings.kind = agent::parse_agent_kind(a.agent);
  if (!a.out.empty()) rc.out_dir = a.out;
  if (a.seed) {
    rc.settings.agent_seed = *a.seed;
    rc.settings.env_seed = *a.seed;
  }
  harness::TrainOptions opt;
  opt.max_steps = a.max_steps;
  opt.resume_from = a.checkpoint;
  if (!a.quiet) opt.log = &std::cerr;
  const auto summary = harness::run_training(rc, opt);
  std::cout << "steps " << summary.steps << "\nepisodes " << summary.episodes << "\nmetrics "
            << summary.metrics_path.string() << "\ncheckpoint " << summary.checkpoint_path.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, std::optional<int> episodes, bool per_episode) {
  if (checkpoint.empty()) throw std::invalid_argument("eval: --checkpoint is required");
  harness::EvalOptions opt;
  opt.episodes = episodes;
  const auto ev = harness::evaluate_checkpoint(checkpoint, opt);
  if (per_episode) {
    std::cout << "episode,reward,episode_length\n";
    for (std::size_t i = 0; i < ev.returns.size(); ++i)
      std::cout << i << ',' << harness::format_real(ev.returns[i]) << ',' << ev.lengths[i] << "\n";
  }
  std::cout << "episodes " << ev.returns.size() << "\nmean_reward " << harness::format_real(ev.mean())
            << "\nmean_length " << ev.mean_length() << "\n";
  return 0;
}

int cmd_report(const std::string& metrics, const std::string& kind, int window, int order, const std::string& out) {
  if (metrics.empty()) throw std::invalid_argument("report: --metrics is required");
  const auto want = agent::parse_row_kind(kind);
  std::vector<std::int64_t> steps;
  std::vector<double> rewards;
  for (const auto& r : harness::read_metrics(metrics)) {
    if (r.kind != want) continue;
    steps.push_back(r.step);
    rewards.push_back(r.reward);
  }
  const auto smooth = harness::savgol_smooth(rewards, window, order);

  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("report: cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "step,reward,smoothed_reward\n";
  for (std::size_t i = 0; i < rewards.size(); ++i)
    os << steps[i] << ',' << harness::format_real(rewards[i]) << ',' << harness::format_real(smooth[i]) << "\n";
  os.flush();
  if (!os) throw std::runtime_error("report: write failed");
  return 0;
}

int cmd_check() {
  bool ok = true;
  for (const auto& r : harness::run_self_check()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (worst " << r.worst << ", tolerance " << r.tolerance
              << ")\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object embedding network Q-learning on grid games"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train an agent and write metrics and checkpoints");
  t->add_option("--config", train.config, "run file (INI)")->check(CLI::ExistingFile);
  t->add_option("--game", train.game, "game file or built-in game name");
  t->add_option("--agent", train.agent, "oen or features");
  t->add_option("--seed", train.seed, "agent and environment seed");
  t->add_option("--max-steps", train.max_steps, "total environment steps");
  t->add_option("--out", train.out, "output directory");
  t->add_option("--checkpoint", train.checkpoint, "resume from this checkpoint")->check(CLI::ExistingFile);
  t->add_flag("--quiet", train.quiet, "no progress output");

  std::string eval_ckpt;
  std::optional<int> eval_episodes;
  bool per_episode = false;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint without training");
  e->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
  e->add_option("--episodes", eval_episodes, "episodes (default: as configured for the run)");
  e->add_flag("--per-episode", per_episode, "print one line per episode");

  std::string metrics, report_out, kind = "train_episode";
  int window = 21, order = 4;
  auto* r = app.add_subcommand("report", "smooth the reward series of a metrics file");
  r->add_option("--metrics", metrics, "metrics.csv")->required()->check(CLI::ExistingFile);
  r->add_option("--kind", kind, "train_episode or eval_summary");
  r->add_option("--window", window, "Savitzky-Golay window (odd)");
  r->add_option("--order", order, "polynomial order");
  r->add_option("--out", report_out, "write CSV here instead of stdout");

  auto* c = app.add_subcommand("check", "run the gradient and invariance self-tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(eval_ckpt, eval_episodes, per_episode);
    if (r->parsed()) return cmd_report(metrics, kind, window, order, report_out);
    if (c->parsed()) return cmd_check();
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
