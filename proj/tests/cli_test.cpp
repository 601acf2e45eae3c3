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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / (std::string("oen_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(OEN_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    Result r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  // A short run file next to the temp directory; paths are relative to it.
  fs::path write_config(std::int64_t max_steps, std::int64_t eval_every) const {
    const fs::path p = dir_ / "short.run";
    std::ofstream os(p);
    os << "[run]\ngame = " << OEN_SOURCE_DIR << "/games/collect.game\nagent = oen\nout = runs/default\n"
       << "[seeds]\nagent = 1\nenv = 1\neval = 12345\n"
       << "[eval]\nevery = " << eval_every << "\nepisodes = 5\n"
       << "[agent]\nmax_steps = " << max_steps << "\n";
    return p;
  }

  fs::path dir_;
};

TEST_F(Cli, TrainTwiceGivesIdenticalMetrics) {
  const auto cfg = write_config(1500, 500);
  for (const char* out : {"a", "b"}) {
    const auto r = run("train --config " + cfg.string() + " --seed 1 --quiet --out " + (dir_ / out).string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("steps 1500"), std::string::npos);
  }
  const auto a = slurp(dir_ / "a" / "metrics.csv"), b = slurp(dir_ / "b" / "metrics.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "checkpoint_step500.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "checkpoint.bin"));
}

TEST_F(Cli, ConfigOutputDirectoryIsRelativeToRunFile) {
  const auto cfg = write_config(40, 0);
  ASSERT_EQ(run("train --config " + cfg.string() + " --quiet").status, 0);
  EXPECT_TRUE(fs::exists(dir_ / "runs" / "default" / "metrics.csv"));
}

TEST_F(Cli, SeedFlagChangesTheRun) {
  const auto cfg = write_config(300, 0);
  ASSERT_EQ(run("train --config " + cfg.string() + " --seed 1 --quiet --out " + (dir_ / "a").string()).status, 0);
  ASSERT_EQ(run("train --config " + cfg.string() + " --seed 2 --quiet --out " + (dir_ / "b").string()).status, 0);
  EXPECT_NE(slurp(dir_ / "a" / "metrics.csv"), slurp(dir_ / "b" / "metrics.csv"));
}

TEST_F(Cli, TrainFromFlagsAlone) {
  const auto r = run("train --game collect --agent features --seed 3 --max-steps 200 --quiet --out " +
                     (dir_ / "f").string());
  ASSERT_EQ(r.status, 0) << r.err;
  const auto m = slurp(dir_ / "f" / "metrics.csv");
  EXPECT_NE(m.find("# agent = features"), std::string::npos);
  EXPECT_NE(m.find("# seeds.agent = 3"), std::string::npos);
}

TEST_F(Cli, EvalReproducesInRunNumbers) {
  const auto cfg = write_config(1000, 1000);
  ASSERT_EQ(run("train --config " + cfg.string() + " --quiet --out " + (dir_ / "e").string()).status, 0);
  const auto metrics = slurp(dir_ / "e" / "metrics.csv");
  const auto pos = metrics.find(",eval_summary,");
  ASSERT_NE(pos, std::string::npos);
  const auto start = pos + std::string(",eval_summary,").size();
  const std::string in_run = metrics.substr(start, metrics.find(',', start) - start);
  const auto r = run("eval --checkpoint " + (dir_ / "e" / "checkpoint_step1000.bin").string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("episodes 5\n"), std::string::npos);
  EXPECT_NE(r.out.find("mean_reward " + in_run + "\n"), std::string::npos) << r.out;
}

TEST_F(Cli, ReportNeedsAtLeastWindowRows) {
  std::ofstream os(dir_ / "m.csv");
  os << "step,episode,kind,reward,episode_length,epsilon,loss_mean,wall_ms\n";
  for (int i = 1; i <= 10; ++i) os << i * 10 << ',' << i << ",train_episode," << i << ",10,0.5,0,0\n";
  os.close();
  const auto r = run("report --metrics " + (dir_ / "m.csv").string() + " --window 21");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("need at least 21"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, ReportWritesSmoothedSeries) {
  std::ofstream os(dir_ / "m.csv");
  os << "# provenance\nstep,episode,kind,reward,episode_length,epsilon,loss_mean,wall_ms\n";
  for (int i = 1; i <= 30; ++i) os << i * 10 << ',' << i << ",train_episode,2.5,10,0.5,0,0\n";
  os << "300,30,eval_summary,1,3,0,0,0\n";
  os.close();
  const auto r = run("report --metrics " + (dir_ / "m.csv").string() + " --out " + (dir_ / "s.csv").string());
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(slurp(dir_ / "s.csv"));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "step,reward,smoothed_reward");
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    const auto a = line.find(','), b = line.rfind(',');
    EXPECT_EQ(line.substr(a, b - a), ",2.5");
    EXPECT_NEAR(std::stod(line.substr(b + 1)), 2.5, 1e-12) << line;
  }
  EXPECT_EQ(n, 30);
}

TEST_F(Cli, BadInputsFailWithMessage) {
  EXPECT_NE(run("").status, 0);
  EXPECT_NE(run("frobnicate").status, 0);
  EXPECT_NE(run("train --config /nonexistent.run").status, 0);

  auto r = run("train --game collect --quiet --out " + (dir_ / "x").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("--seed is required"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x"));

  std::ofstream(dir_ / "broken.run") << "[run]\ngame = " OEN_SOURCE_DIR "/games/collect.game\n[seeds]\nagent = 1\nenv = 1\neval = 1\n[agent]\ngamma = 2\n";
  r = run("train --config " + (dir_ / "broken.run").string() + " --quiet --out " + (dir_ / "y").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("gamma"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "y" / "metrics.csv"));

  std::ofstream(dir_ / "junk.bin") << "junk";
  r = run("eval --checkpoint " + (dir_ / "junk.bin").string());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("not an OEN checkpoint"), std::string::npos);
}

TEST_F(Cli, CheckPasses) {
  const auto r = run("check");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

}  // namespace
