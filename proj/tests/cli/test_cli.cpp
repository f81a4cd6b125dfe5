// ----------------------------------------------------------------------------
// Copyright 2026 The ProxLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------
// Runs the proxlab executable end to end.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result cli(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / "proxlab_cli_test.log";
  const std::string cmd = env + " " + PROXLAB_CLI + " " + args + " >" + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream s;
  s << in.rdbuf();
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("proxlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& text, const std::string& name = "run.cfg") {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const char* kSmall = "total_timesteps = 512\ntimesteps_per_epoch = 256\nhidden = 8\nseed = 2\n";

TEST_F(Cli, TrainWritesArtifactsDeterministically) {
  const auto cfg = config(kSmall);
  ASSERT_EQ(cli("train --config " + cfg + " --out " + out("a")).code, 0);
  ASSERT_EQ(cli("train --config " + cfg + " --out " + out("b")).code, 0);
  const std::string csv = slurp(dir_ / "a" / "metrics.csv");
  EXPECT_EQ(csv, slurp(dir_ / "b" / "metrics.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.resolved"));

  std::istringstream lines(csv);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);  // header + 2 epochs
  EXPECT_EQ(csv.rfind("epoch,", 0), 0u);
}

TEST_F(Cli, SeedPrecedence) {
  const auto cfg = config(kSmall);
  ASSERT_EQ(cli("train --config " + cfg + " --out " + out("file")).code, 0);
  ASSERT_EQ(cli("train --config " + cfg + " --out " + out("env"), "PROXLAB_SEED=7").code, 0);
  ASSERT_EQ(cli("train --config " + cfg + " --out " + out("flag") + " --seed 9", "PROXLAB_SEED=7").code, 0);
  EXPECT_NE(slurp(dir_ / "file" / "config.resolved").find("seed = 2\n"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "env" / "config.resolved").find("seed = 7\n"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "flag" / "config.resolved").find("seed = 9\n"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "env" / "metrics.csv"), slurp(dir_ / "file" / "metrics.csv"));
  EXPECT_NE(cli("train --config " + cfg + " --out " + out("bad"), "PROXLAB_SEED=abc").code, 0);
}

TEST_F(Cli, BadInputsFail) {
  const auto r = cli("train --config " + config("seed = 1\nepsilon = 1.5\n") + " --out " + out("x"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
  EXPECT_NE(cli("train --out " + out("y")).code, 0);
  EXPECT_NE(cli("train --config /nonexistent.cfg --out " + out("z")).code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
  EXPECT_NE(cli("verify --fixture nonsense --out " + out("v")).code, 0);
}

TEST_F(Cli, SweepMatchesIndividualRuns) {
  const auto cfg = config(kSmall);
  ASSERT_EQ(cli("sweep --config " + cfg + " --seeds 2 --out " + out("sweep")).code, 0);
  ASSERT_EQ(cli("train --config " + cfg + " --seed 3 --out " + out("single")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "seed_2" / "metrics.csv"));
  EXPECT_EQ(slurp(dir_ / "sweep" / "seed_3" / "metrics.csv"), slurp(dir_ / "single" / "metrics.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "sweep" / "seed_4"));
}

TEST_F(Cli, VerifyAndFixtures) {
  const auto clean = cli("verify --out " + out("clean"));
  EXPECT_EQ(clean.code, 0) << clean.output;
  const std::string report = slurp(dir_ / "clean" / "verify_report.txt");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 14);
  EXPECT_EQ(report.find("FAIL"), std::string::npos);
  EXPECT_TRUE(std::regex_search(report, std::regex("theorem_6_monotonic +PASS")));

  for (const char* fixture : {"rollback_slope", "drop_min"}) {
    const auto r = cli(std::string("verify --fixture ") + fixture + " --out " + out(fixture));
    EXPECT_EQ(r.code, 1) << fixture;
    EXPECT_NE(slurp(dir_ / fixture / "verify_report.txt").find(" FAIL "), std::string::npos) << fixture;
  }
}

}  // namespace
