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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. `--only a,b` restricts the run; `--list` prints the names.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oen/agent/dqn.hpp"
#include "oen/agent/models.hpp"
#include "oen/agent/replay.hpp"
#include "oen/game/builtin_games.hpp"
#include "oen/game/engine.hpp"
#include "oen/game/parser.hpp"
#include "oen/harness/savgol.hpp"
#include "oen/nn/gradcheck.hpp"
#include "oen/observe/observe.hpp"
#include "oen/rng.hpp"
#include "oen/setnet/oen.hpp"

namespace {

namespace fs = std::filesystem;
using oen::nn::Index;
using oen::nn::Matrix;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Matrix gaussian(Index rows, Index cols, oen::Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

Index pick(oen::Rng& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

oen::setnet::FeatureSetBatch single(const Matrix& x) { return {{x.rows(), {x.rows()}}, x}; }

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / "oen_acceptance";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OEN_CLI_PATH) + " " + args;
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

oen::game::GameSpec collect() { return oen::game::parse_game(oen::game::builtin::kCollect); }

// ---------------------------------------------------------------------------

Outcome permutation() {
  oen::Rng rng(101);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const Index k = pick(rng, 1, 32), d = pick(rng, 3, 12), m = pick(rng, 2, 6);
    const auto p = oen::setnet::make_oen_params(d, m, rng.next());
    const Matrix x = gaussian(k, d, rng);
    std::vector<Index> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    Matrix xp(k, d);
    for (Index i = 0; i < k; ++i) xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    const Matrix diff = oen::setnet::oen_forward(single(x), p) - oen::setnet::oen_forward(single(xp), p);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "1000 cases, max |dQ| " + fmt(worst) + " (tol 1e-9)"};
}

Outcome padding() {
  oen::Rng rng(102);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const Index k = pick(rng, 1, 32), d = pick(rng, 3, 12), m = pick(rng, 2, 6), pad = pick(rng, 1, 8);
    const auto p = oen::setnet::make_oen_params(d, m, rng.next());
    const Matrix x = gaussian(k, d, rng);
    // Pad rows hold large garbage; the mask alone must keep them out.
    oen::setnet::FeatureSetBatch padded{{k + pad, {k}}, gaussian(k + pad, d, rng, 1e3)};
    padded.data.topRows(k) = x;
    const Matrix diff = oen::setnet::oen_forward(single(x), p) - oen::setnet::oen_forward(padded, p);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst < 1e-12, "1000 cases, max |dQ| " + fmt(worst) + " (tol 1e-12)"};
}

Outcome gradients() {
  // Evaluated at a generic point: nonzero biases keep pre-activations off the
  // relu kinks that zero-bias initialisation puts exactly at zero.
  oen::Rng rng(1);
  auto p = oen::setnet::make_oen_params(5, 4, rng.next());
  for (auto* net : {&p.embedding, &p.head})
    for (auto& l : net->layers)
      for (Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.1 * rng.normal();
  const auto batch = single(gaussian(4, 5, rng));
  const Matrix coef = gaussian(1, 4, rng);
  oen::setnet::OenForwardRecord rec;
  oen::setnet::oen_forward(batch, p, rec);
  auto grads = oen::setnet::zero_gradients(p);
  oen::setnet::oen_backward(p, rec, coef, grads);
  const auto analytic = oen::nn::flatten(grads);
  const auto oen_res = oen::nn::finite_diff_check(p, std::span<const double>(analytic), [&] {
    return oen::setnet::oen_forward(batch, p).cwiseProduct(coef).sum();
  });
  std::size_t over = 0;
  {
    // Count offending entries with a second pass over the same stencil.
    std::size_t idx = 0;
    oen::setnet::for_each_parameter(p, [&](double& w) {
      const double saved = w;
      w = saved + 1e-5;
      const double plus = oen::setnet::oen_forward(batch, p).cwiseProduct(coef).sum();
      w = saved - 1e-5;
      const double minus = oen::setnet::oen_forward(batch, p).cwiseProduct(coef).sum();
      w = saved;
      if (oen::nn::relative_error(analytic[idx], (plus - minus) / 2e-5) >= 1e-5) ++over;
      ++idx;
    });
  }

  auto net = oen::agent::build_baseline_mlp(7, 5, rng.next(), false, 0.1);
  for (auto& l : net.layers)
    for (Index i = 0; i < l.biases.size(); ++i) l.biases(i) = 0.1 * rng.normal();
  const auto mlp_res =
      oen::nn::finite_diff_check(net, gaussian(3, 7, rng, 2.0), oen::nn::LinearProbeLoss{gaussian(3, 5, rng)});

  const bool ok = oen_res.max_relative_error < 1e-5 && mlp_res.max_relative_error < 1e-5;
  std::ostringstream os;
  os << "oen " << oen_res.parameters << " params max rel " << fmt(oen_res.max_relative_error) << " (" << over
     << " entries >= tol; worst a=" << fmt(oen_res.worst_analytic) << " n=" << fmt(oen_res.worst_numeric)
     << "; scaled " << fmt(oen_res.max_scaled_error) << "), mlp " << mlp_res.parameters << " params max rel "
     << fmt(mlp_res.max_relative_error) << " (tol 1e-5)";
  return {ok, os.str()};
}

Outcome bellman() {
  using oen::agent::FeaturesModel;
  using Item = oen::agent::TransitionOf<FeaturesModel>;
  oen::agent::AgentConfig cfg;
  const auto spec = collect();
  FeaturesModel model(spec, cfg);
  // All weights zero: every output row equals the last bias, whatever the input.
  auto nets = oen::agent::make_agent_nets(model, 5, cfg);
  for (auto* net : {&nets.online, &nets.target})
    for (auto& l : net->layers) {
      l.weights.setZero();
      l.biases.setZero();
    }
  Eigen::VectorXd b(5);
  b << 2.0, 0.5, -1.0, 0.25, 0.0;
  nets.online.layers.back().biases = b;
  nets.target.layers.back().biases = b;

  const Eigen::VectorXd obs = Eigen::VectorXd::Ones(model.registry.baseline_dim());
  Item live{0, obs, 1, 1.0, obs, false}, dead{1, obs, 0, 1.0, obs, true};
  const Item* batch[] = {&live, &dead};
  double worst = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };

  const auto y = oen::agent::compute_targets<FeaturesModel>(batch, nets.target, 0.99);
  track(y(0), 2.98);
  track(y(1), 1.0);
  const auto y0 = oen::agent::compute_targets<FeaturesModel>(batch, nets.target, 0.0);
  track(y0(0), 1.0);
  track(y0(1), 1.0);

  // Residuals 0.5 - 2.98 and 2 - 1; loss is their mean square.
  const double loss = oen::agent::train_step<FeaturesModel>(batch, nets, cfg);
  track(loss, (2.48 * 2.48 + 1.0) / 2.0);
  // First Adam step on the output bias: -lr * g / (|g| + eps), g = 2 * residual / 2.
  const auto& after = nets.online.layers.back().biases;
  track(after(1), 0.5 + cfg.learning_rate * 2.48 / (2.48 + cfg.adam_epsilon));
  track(after(0), 2.0 - cfg.learning_rate * 1.0 / (1.0 + cfg.adam_epsilon));
  track(after(2), -1.0);
  track(after(3), 0.25);
  track(after(4), 0.0);
  return {worst <= 1e-12, "max deviation from hand values " + fmt(worst) + " (tol 1e-12)"};
}

Outcome batched() {
  oen::Rng rng(104);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const Index d = pick(rng, 3, 12), m = pick(rng, 2, 6), n = pick(rng, 2, 16);
    const auto p = oen::setnet::make_oen_params(d, m, rng.next());
    std::vector<Matrix> sets;
    for (Index i = 0; i < n; ++i) sets.push_back(gaussian(pick(rng, 1, 20), d, rng));
    const Matrix q = oen::setnet::oen_forward(oen::observe::pad_batch(sets), p);
    for (Index i = 0; i < n; ++i) {
      const Matrix qi = oen::setnet::oen_forward(single(sets[static_cast<std::size_t>(i)]), p);
      worst = std::max(worst, (q.row(i) - qi.row(0)).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-12, "200 batches, max |dQ| " + fmt(worst) + " (tol 1e-12)"};
}

// Least-squares fit over the (possibly truncated) window by normal equations
// in long double, evaluated at the centre sample.
double savgol_oracle(const std::vector<double>& y, int i, int half, int order) {
  const int n = static_cast<int>(y.size());
  const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
  const int p = std::min(order, hi - lo) + 1;
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  for (int j = lo; j <= hi; ++j) {
    const long double t = static_cast<long double>(j - i) / half;
    std::vector<long double> pw(2 * p, 1.0L);
    for (int k = 1; k < 2 * p; ++k) pw[k] = pw[k - 1] * t;
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) a[r][c] += pw[r + c];
      a[r][p] += pw[r] * y[static_cast<std::size_t>(j)];
    }
  }
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int r = c + 1; r < p; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < p; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (int k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return static_cast<double>(a[0][p] / a[0][0]);
}

Outcome savgol() {
  oen::Rng rng(105);
  double poly_worst = 0.0, oracle_worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int degree = static_cast<int>(rng.below(5));
    std::vector<double> coef(static_cast<std::size_t>(degree) + 1);
    for (double& v : coef) v = rng.normal();
    std::vector<double> y(200);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double t = (static_cast<double>(i) - 100.0) / 100.0;
      double v = 0.0;
      for (auto it = coef.rbegin(); it != coef.rend(); ++it) v = v * t + *it;
      y[i] = v;
    }
    const auto s = oen::harness::savgol_smooth(y, 21, 4);
    for (std::size_t i = 0; i < y.size(); ++i) poly_worst = std::max(poly_worst, std::abs(s[i] - y[i]));

    std::vector<double> r(static_cast<std::size_t>(pick(rng, 21, 150)));
    for (double& v : r) v = rng.normal();
    const auto sr = oen::harness::savgol_smooth(r, 21, 4);
    for (int i = 0; i < static_cast<int>(r.size()); ++i)
      oracle_worst = std::max(oracle_worst, std::abs(sr[static_cast<std::size_t>(i)] - savgol_oracle(r, i, 10, 4)));
  }
  return {poly_worst < 1e-9 && oracle_worst < 1e-9,
          "polynomial max err " + fmt(poly_worst) + ", least-squares oracle max err " + fmt(oracle_worst) +
              " (tol 1e-9)"};
}

Outcome determinism() {
  const fs::path dir = work_dir() / "determinism";
  fs::remove_all(dir);
  std::string detail;
  bool ok = true;
  for (const char* kind : {"oen", "features"}) {
    const std::string cfg = std::string(OEN_SOURCE_DIR) + "/configs/collect_" + kind + ".run";
    std::string files[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (std::string(kind) + std::to_string(run));
      if (run_cli("train --config " + cfg + " --seed 1 --max-steps 10000 --quiet --out " + out.string() +
                  " >/dev/null") != 0)
        return {false, std::string(kind) + " run failed"};
      files[run] = slurp(out / "metrics.csv");
    }
    const bool same = !files[0].empty() && files[0] == files[1];
    ok = ok && same;
    detail += std::string(detail.empty() ? "" : ", ") + kind + " 10000 steps " +
              (same ? "byte-identical" : "DIFFER") + " (" + std::to_string(files[0].size()) + " bytes)";
  }
  return {ok, detail};
}

// Uniform-random play on the shipped game, 500 episodes.
struct RandomBaseline {
  double mean = 0.0, half_ci = 0.0;
};

RandomBaseline random_baseline() {
  const auto spec = collect();
  oen::game::Environment env(spec);
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> action(0, spec.action_count() - 1);
  std::vector<double> returns;
  for (int e = 0; e < 500; ++e) {
    env.reset(static_cast<std::uint64_t>(1000 + e));
    double total = 0.0;
    while (!env.has_ended()) total += env.step(action(gen)).reward;
    returns.push_back(total);
  }
  RandomBaseline b;
  b.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / 500.0;
  double ss = 0.0;
  for (double r : returns) ss += (r - b.mean) * (r - b.mean);
  b.half_ci = 1.96 * std::sqrt(ss / 499.0 / 500.0);
  return b;
}

Outcome learning(const std::string& kind) {
  const auto base = random_baseline();
  const fs::path out = work_dir() / ("learning_" + kind);
  fs::remove_all(out);
  const std::string cfg = std::string(OEN_SOURCE_DIR) + "/configs/collect_" + kind + ".run";
  if (run_cli("train --config " + cfg + " --seed 1 --max-steps 50000 --quiet --out " + out.string() + " >/dev/null") !=
      0)
    return {false, "training run failed"};
  // Columns: step,episode,kind,reward,...
  std::istringstream lines(slurp(out / "metrics.csv"));
  std::string line;
  double eval = NAN;
  while (std::getline(lines, line)) {
    if (line.rfind("50000,", 0) != 0 || line.find(",eval_summary,") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    eval = std::stod(f.at(3));
  }
  if (std::isnan(eval)) return {false, "no eval at step 50000"};
  const double need = 2.0 * base.mean;
  std::ostringstream os;
  os << kind << " eval mean " << eval << " over 50 episodes, random mean " << base.mean << " +- " << base.half_ci
     << " (500 episodes), need >= " << need;
  return {eval >= need, os.str()};
}

Outcome schedule() {
  oen::agent::RunSettings s;
  s.kind = oen::agent::AgentKind::kOen;
  s.eval_every = 0;
  oen::agent::TrainingSession<oen::agent::OenModel> session(collect(), s);
  session.run(2000);
  const auto& c = session.counters();
  const std::int64_t expected = (2000 - s.config.learn_start) / 4;
  const bool ok =
      c.optimizer_steps == expected && c.target_sync_steps == std::vector<std::int64_t>{1000, 2000};
  std::ostringstream os;
  os << "optimizer steps " << c.optimizer_steps << " (want " << expected << "), syncs at";
  for (auto v : c.target_sync_steps) os << " " << v;
  return {ok, os.str()};
}

Outcome replay_fifo() {
  bool ok = true;
  std::string detail = "capacity 100, k in";
  for (int k : {1, 7, 50, 100, 101, 999}) {
    oen::agent::ReplayMemory<int> memory(100);
    std::deque<std::uint64_t> model;
    for (int i = 0; i < 100 + k; ++i) {
      oen::agent::Transition<int> t;
      t.observation = i;
      model.push_back(memory.add(t));
      if (model.size() > 100) model.pop_front();
    }
    // Ids are insertion numbers, scanned oldest first; the survivors are
    // exactly the last 100.
    const auto ids = memory.ids();
    std::vector<std::uint64_t> want(model.begin(), model.end());
    std::vector<std::uint64_t> seq(100);
    std::iota(seq.begin(), seq.end(), static_cast<std::uint64_t>(k));
    const bool good = ids == want && want == seq && memory.size() == 100;
    ok = ok && good;
    detail += " " + std::to_string(k) + (good ? "" : "(FAIL)");
  }
  return {ok, detail + ": oldest k evicted"};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::vector<Criterion> criteria() {
  return {{"permutation", permutation},
          {"padding", padding},
          {"gradient", gradients},
          {"bellman", bellman},
          {"batched", batched},
          {"savgol", savgol},
          {"determinism", determinism},
          {"learning_oen", [] { return learning("oen"); }},
          {"learning_features", [] { return learning("features"); }},
          {"schedule", schedule},
          {"replay_fifo", replay_fifo}};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--list") {
      for (const auto& c : criteria()) std::cout << c.name << "\n";
      return 0;
    }
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string n; std::getline(ss, n, ',');) only.insert(n);
    } else {
      std::cerr << "usage: acceptance [--list] [--only name[,name...]]\n";
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && !only.count(c.name)) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no criterion matched\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
