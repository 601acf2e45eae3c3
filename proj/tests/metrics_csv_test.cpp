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
#include <sstream>

#include "oen/agent/dqn.hpp"
#include "oen/game/builtin_games.hpp"
#include "oen/game/parser.hpp"
#include "oen/harness/metrics_csv.hpp"
#include "oen/rng.hpp"

namespace {

using namespace oen;
using agent::MetricsRow;

std::vector<MetricsRow> round_trip(const std::vector<MetricsRow>& rows, const std::vector<std::string>& prov = {}) {
  std::stringstream ss;
  harness::write_metrics(ss, rows, prov);
  return harness::read_metrics(ss);
}

TEST(MetricsCsv, EmptyRunIsHeaderOnly) {
  std::stringstream ss;
  harness::write_metrics(ss, {});
  EXPECT_EQ(ss.str(), std::string(harness::kMetricsHeader) + "\n");
  EXPECT_TRUE(harness::read_metrics(ss).empty());
}

TEST(MetricsCsv, RoundTripIsExact) {
  Rng rng(12);
  std::vector<MetricsRow> rows;
  for (int i = 0; i < 200; ++i) {
    MetricsRow r;
    r.step = 17 * i;
    r.episode = i;
    r.kind = i % 10 == 9 ? agent::RowKind::kEvalSummary : agent::RowKind::kTrainEpisode;
    r.reward = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10);
    r.episode_length = static_cast<std::int64_t>(rng.below(2000));
    r.epsilon = rng.uniform();
    r.loss_mean = i == 0 ? std::numeric_limits<double>::denorm_min() : rng.uniform() / 3.0;
    r.wall_ms = i * 5;
    rows.push_back(r);
  }
  EXPECT_EQ(round_trip(rows, {"game = collect", "gamma = 0.99"}), rows);
}

TEST(MetricsCsv, ProvenanceLinesPrefixed) {
  std::stringstream ss;
  harness::write_metrics(ss, {}, {"a = 1", "b = 2"});
  EXPECT_EQ(ss.str(), "# a = 1\n# b = 2\n" + std::string(harness::kMetricsHeader) + "\n");
}

TEST(MetricsCsv, MalformedFilesRejected) {
  std::stringstream no_header("1,1,train_episode,0,0,0,0,0\n");
  EXPECT_THROW(harness::read_metrics(no_header), std::runtime_error);
  std::stringstream short_row(std::string(harness::kMetricsHeader) + "\n1,2,3\n");
  EXPECT_THROW(harness::read_metrics(short_row), std::runtime_error);
  std::stringstream bad_kind(std::string(harness::kMetricsHeader) + "\n1,1,warmup,0,0,0,0,0\n");
  EXPECT_THROW(harness::read_metrics(bad_kind), std::invalid_argument);
  std::stringstream empty("");
  EXPECT_THROW(harness::read_metrics(empty), std::runtime_error);
  EXPECT_THROW(harness::write_metrics("/nonexistent/dir/m.csv", {}), std::runtime_error);
}

TEST(MetricsCsv, EvalSummaryCountIsStepsOverEvalEvery) {
  agent::RunSettings s;
  s.kind = agent::AgentKind::kFeatures;
  s.eval_every = 500;
  s.eval_episodes = 2;
  for (std::int64_t steps : {499, 500, 1999, 2000}) {
    agent::TrainingSession<agent::FeaturesModel> session(game::parse_game(*game::builtin::find("collect")), s);
    session.run(steps);
    const auto rows = round_trip(session.rows());
    const auto evals = std::count_if(rows.begin(), rows.end(),
                                     [](const MetricsRow& r) { return r.kind == agent::RowKind::kEvalSummary; });
    EXPECT_EQ(evals, steps / 500) << steps;
    for (const auto& r : rows) {
      if (r.kind == agent::RowKind::kEvalSummary) {
        EXPECT_EQ(r.step % 500, 0);
      }
    }
  }
}

}  // namespace
