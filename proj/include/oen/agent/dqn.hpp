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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "oen/agent/config.hpp"
#include "oen/agent/metrics.hpp"
#include "oen/agent/models.hpp"
#include "oen/agent/replay.hpp"
#include "oen/game/engine.hpp"
#include "oen/rng.hpp"

namespace oen::agent {

/// Uniform random action with probability epsilon, otherwise the argmax
/// (lowest index on ties). No random draw is made when epsilon is 0.
template <class Derived>
int select_action(const Eigen::DenseBase<Derived>& q, double epsilon, Rng& rng) {
  const auto m = static_cast<std::uint64_t>(q.size());
  if (m == 0) throw std::invalid_argument("select_action: no action values");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return static_cast<int>(rng.below(m));
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i)
    if (q(i) > q(best)) best = i;
  return static_cast<int>(best);
}

inline double bellman_target(double reward, bool terminal, double gamma, double max_next_q,
                             BootstrapRule rule = BootstrapRule::kNonTerminal) {
  const bool bootstrap = rule == BootstrapRule::kNonTerminal ? !terminal : terminal;
  return bootstrap ? reward + gamma * max_next_q : reward;
}

template <class Model>
struct AgentNets {
  typename Model::Params online;
  typename Model::Params target;
  typename Model::Optimizer optimizer;

  void sync_target() { target = online; }
};

template <class Model>
AgentNets<Model> make_agent_nets(const Model& model, std::uint64_t seed, const AgentConfig& config) {
  auto online = model.init(seed);
  nn::AdamOptions opts{config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon};
  auto optimizer = Model::make_optimizer(online, opts);
  auto target = online;
  return {std::move(online), std::move(target), std::move(optimizer)};
}

template <class Model>
using TransitionOf = Transition<typename Model::Observation>;

/// r + gamma * max_a Q(next, a; target) per transition, honouring the terminal rule.
template <class Model>
Eigen::VectorXd compute_targets(std::span<const TransitionOf<Model>* const> batch,
                                const typename Model::Params& target_params, double gamma,
                                BootstrapRule rule = BootstrapRule::kNonTerminal) {
  std::vector<const typename Model::Observation*> next;
  next.reserve(batch.size());
  for (const auto* t : batch) next.push_back(&t->next_observation);
  const Matrix q_next = Model::q_values(target_params, next);
  Eigen::VectorXd y(static_cast<Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto i = static_cast<Index>(b);
    y(i) = bellman_target(batch[b]->reward, batch[b]->terminal, gamma, q_next.row(i).maxCoeff(), rule);
  }
  return y;
}

/// Mean squared TD error over the batch and its gradient. Only the taken
/// action's output receives gradient. Returns the loss; `grads` is overwritten.
template <class Model>
double td_loss_and_gradient(const typename Model::Params& params, std::span<const TransitionOf<Model>* const> batch,
                            const Eigen::VectorXd& targets, typename Model::Gradients& grads) {
  std::vector<const typename Model::Observation*> obs;
  obs.reserve(batch.size());
  for (const auto* t : batch) obs.push_back(&t->observation);
  typename Model::Record record;
  const Matrix q = Model::q_values(params, obs, record);
  const auto n = static_cast<Index>(batch.size());
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Index b = 0; b < n; ++b) {
    const int a = batch[static_cast<std::size_t>(b)]->action;
    if (a < 0 || a >= q.cols()) throw std::invalid_argument("train_step: action out of range");
    const double residual = q(b, a) - targets(b);
    loss += residual * residual;
    dq(b, a) = 2.0 * residual / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw std::domain_error("train_step: non-finite loss");
  grads = Model::zero_gradients(params);
  Model::backward(params, record, dq, grads);
  return loss;
}

/// One optimizer step on a sampled batch. Returns the pre-update loss.
template <class Model>
double train_step(std::span<const TransitionOf<Model>* const> batch, AgentNets<Model>& nets,
                  const AgentConfig& config) {
  const Eigen::VectorXd y = compute_targets<Model>(batch, nets.target, config.gamma, config.bootstrap);
  typename Model::Gradients grads;
  const double loss = td_loss_and_gradient<Model>(nets.online, batch, y, grads);
  Model::apply(nets.online, grads, nets.optimizer);
  return loss;
}

struct EvalResult {
  std::vector<double> returns;
  std::vector<std::int64_t> lengths;
  double mean() const {
    if (returns.empty()) return 0.0;
    double s = 0.0;
    for (double r : returns) s += r;
    return s / static_cast<double>(returns.size());
  }
  std::int64_t mean_length() const {
    if (lengths.empty()) return 0;
    std::int64_t s = 0;
    for (auto l : lengths) s += l;
    return s / static_cast<std::int64_t>(lengths.size());
  }
};

/// Runs the policy for `episodes` episodes without learning. Episode e is
/// reset with derive_seed(eval_seed, e), so results depend only on the
/// parameters and the seed.
template <class Model>
EvalResult evaluate(const Model& model, const typename Model::Params& params, const game::GameSpec& spec,
                    int episodes, std::uint64_t eval_seed, double epsilon = 0.0,
                    std::int64_t max_episode_steps = 100'000) {
  EvalResult result;
  game::Environment env(spec);
  for (int e = 0; e < episodes; ++e) {
    env.reset(derive_seed(eval_seed, static_cast<std::uint64_t>(e)));
    Rng rng(derive_seed(eval_seed, (1ULL << 32) + static_cast<std::uint64_t>(e)));
    double ret = 0.0;
    std::int64_t len = 0;
    while (!env.has_ended() && len < max_episode_steps) {
      const auto objects = env.objects();
      int action = game::kNoop;
      if (model.encodable(objects)) {
        const auto obs = model.encode(objects);
        const typename Model::Observation* one[] = {&obs};
        action = select_action(Model::q_values(params, one).row(0), epsilon, rng);
      }
      ret += env.step(action).reward;
      ++len;
    }
    result.returns.push_back(ret);
    result.lengths.push_back(len);
  }
  return result;
}

struct RunSettings {
  AgentKind kind = AgentKind::kOen;
  AgentConfig config;
  std::uint64_t agent_seed = 1;
  std::uint64_t env_seed = 1;
  std::uint64_t eval_seed = 12345;
  std::int64_t eval_every = 50'000;
  int eval_episodes = 50;
  bool record_wall_time = false;
};

/// Counters exposed for schedule checks.
struct ScheduleCounters {
  std::int64_t optimizer_steps = 0;
  std::vector<std::int64_t> target_sync_steps;
  std::int64_t first_train_step = 0;
};

/// All mutable state of one training run: the Q-learning loop with replay,
/// epsilon-greedy acting, periodic target sync and periodic evaluation.
template <class Model>
class TrainingSession {
 public:
  using Observation = typename Model::Observation;
  using EvalHook = std::function<void(const TrainingSession&, const EvalResult&)>;

  TrainingSession(game::GameSpec spec, RunSettings settings)
      : spec_(std::move(spec)),
        settings_(std::move(settings)),
        model_(spec_, settings_.config),
        nets_(make_agent_nets(model_, derive_seed(settings_.agent_seed, 0), settings_.config)),
        replay_(static_cast<std::size_t>(settings_.config.replay_capacity)),
        rng_(derive_seed(settings_.agent_seed, 1)),
        env_(spec_) {
    settings_.config.validate();
    env_.reset(derive_seed(settings_.env_seed, 0));
  }

  void set_eval_hook(EvalHook hook) { eval_hook_ = std::move(hook); }
  // A resumed run may be extended past the horizon it was saved with.
  void set_max_steps(std::int64_t n) { settings_.config.max_steps = n; }

  /// Advances until `max_steps` environment steps have been taken in total.
  void run(std::int64_t max_steps) {
    const auto started = std::chrono::steady_clock::now();
    const auto& c = settings_.config;
    while (step_ < max_steps) {
      ++step_;
      const auto objects = env_.objects();
      const Observation obs = model_.encode(objects);
      const double eps = epsilon_schedule(step_ - 1, c);
      const Observation* one[] = {&obs};
      const int action = select_action(Model::q_values(nets_.online, one).row(0), eps, rng_);

      const game::StepResult sr = env_.step(action);
      const auto next_objects = env_.objects();
      const auto& gs = env_.state();
      TransitionOf<Model> t;
      t.observation = obs;
      t.action = action;
      t.reward = sr.reward;
      // The next state may not be encodable once the avatar is gone; the
      // value is never bootstrapped from then, so the current one stands in.
      t.next_observation = model_.encodable(next_objects) ? model_.encode(next_objects) : obs;
      t.terminal = sr.terminal && (!gs.timed_out || c.timeout_is_terminal);
      replay_.add(std::move(t));

      episode_return_ += sr.reward;
      episode_length_ += 1;

      if (step_ > c.learn_start && (step_ - c.learn_start) % c.train_every == 0) {
        const auto batch = replay_.sample(static_cast<std::size_t>(c.batch_size), rng_);
        const double loss = train_step<Model>(std::span<const TransitionOf<Model>* const>(batch), nets_, c);
        if (counters_.optimizer_steps == 0) counters_.first_train_step = step_;
        counters_.optimizer_steps += 1;
        episode_loss_sum_ += loss;
        episode_loss_count_ += 1;
      }
      if (step_ % c.target_sync_every == 0) {
        nets_.sync_target();
        counters_.target_sync_steps.push_back(step_);
      }
      if (sr.terminal) {
        MetricsRow row;
        row.step = step_;
        row.episode = episode_ + 1;
        row.kind = RowKind::kTrainEpisode;
        row.reward = episode_return_;
        row.episode_length = episode_length_;
        row.epsilon = epsilon_schedule(step_, c);
        row.loss_mean = episode_loss_count_ ? episode_loss_sum_ / static_cast<double>(episode_loss_count_) : 0.0;
        row.wall_ms = wall_ms(started);
        rows_.push_back(row);
        ++episode_;
        episode_return_ = 0.0;
        episode_length_ = 0;
        episode_loss_sum_ = 0.0;
        episode_loss_count_ = 0;
        env_.reset(derive_seed(settings_.env_seed, static_cast<std::uint64_t>(episode_)));
      }
      if (settings_.eval_every > 0 && step_ % settings_.eval_every == 0) {
        const EvalResult ev = evaluate_now();
        MetricsRow row;
        row.step = step_;
        row.episode = episode_;
        row.kind = RowKind::kEvalSummary;
        row.reward = ev.mean();
        row.episode_length = ev.mean_length();
        row.epsilon = c.eval_epsilon;
        row.loss_mean = 0.0;
        row.wall_ms = wall_ms(started);
        rows_.push_back(row);
        if (eval_hook_) eval_hook_(*this, ev);
      }
    }
  }

  EvalResult evaluate_now() const {
    return evaluate(model_, nets_.online, spec_, settings_.eval_episodes, settings_.eval_seed,
                    settings_.config.eval_epsilon, eval_step_cap());
  }

  std::int64_t eval_step_cap() const {
    const auto t = spec_.timeout();
    return t > 0 ? t : 100'000;
  }

  const game::GameSpec& spec() const { return spec_; }
  const RunSettings& settings() const { return settings_; }
  const Model& model() const { return model_; }
  const AgentNets<Model>& nets() const { return nets_; }
  const ReplayMemory<Observation>& replay() const { return replay_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  const ScheduleCounters& counters() const { return counters_; }
  std::int64_t step() const { return step_; }
  std::int64_t episode() const { return episode_; }

  // Mutable views used by checkpoint loading.
  struct Internals {
    AgentNets<Model>* nets;
    ReplayMemory<Observation>* replay;
    Rng* rng;
    game::Environment* env;
    std::vector<MetricsRow>* rows;
    ScheduleCounters* counters;
    std::int64_t* step;
    std::int64_t* episode;
    double* episode_return;
    std::int64_t* episode_length;
    double* episode_loss_sum;
    std::int64_t* episode_loss_count;
  };
  Internals internals() {
    return {&nets_, &replay_, &rng_, &env_, &rows_, &counters_, &step_, &episode_,
            &episode_return_, &episode_length_, &episode_loss_sum_, &episode_loss_count_};
  }
  const Rng& rng() const { return rng_; }
  const game::Environment& env() const { return env_; }
  double episode_return() const { return episode_return_; }
  std::int64_t episode_length() const { return episode_length_; }
  double episode_loss_sum() const { return episode_loss_sum_; }
  std::int64_t episode_loss_count() const { return episode_loss_count_; }

 private:
  std::int64_t wall_ms(std::chrono::steady_clock::time_point started) const {
    if (!settings_.record_wall_time) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  }

  game::GameSpec spec_;
  RunSettings settings_;
  Model model_;
  AgentNets<Model> nets_;
  ReplayMemory<Observation> replay_;
  Rng rng_;
  game::Environment env_;
  EvalHook eval_hook_;
  std::vector<MetricsRow> rows_;
  ScheduleCounters counters_;
  std::int64_t step_ = 0;
  std::int64_t episode_ = 0;
  double episode_return_ = 0.0;
  std::int64_t episode_length_ = 0;
  double episode_loss_sum_ = 0.0;
  std::int64_t episode_loss_count_ = 0;
};

}  // namespace oen::agent
