// Copyright 2026 The cbvf Authors
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

#include "cbvf/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cbvf/io.h"

namespace cbvf {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = fs::path(CBVF_SOURCE_DIR) / "configs";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("cbvf_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "cbvf");
    args.push_back("--quiet");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return RunCli(static_cast<int>(argv.size()), argv.data());
  }

  fs::path Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    WriteFileAtomic(p, text);
    return p;
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static nlohmann::json Json(const fs::path& p) { return nlohmann::json::parse(Slurp(p)); }

  fs::path dir_;
};

TEST_F(CliTest, SolveWritesSeriesAndManifest) {
  const fs::path out = dir_ / "solve";
  ASSERT_EQ(Run({"solve", "--config", (kConfigs / "scalar_example.json").string(), "--out",
                 out.string()}),
            kExitPass);
  for (const char* stem : {"v_T0", "v_T0.5", "v_T1", "v_T1.5", "v_T2"}) {
    EXPECT_TRUE(fs::exists(out / (std::string(stem) + ".csv"))) << stem;
    EXPECT_TRUE(fs::exists(out / (std::string(stem) + ".json"))) << stem;
  }
  const nlohmann::json m = Json(out / "manifest.json");
  EXPECT_EQ(m["system"], "scalar_example");
  EXPECT_GT(m["steps"].get<int>(), 0);
  EXPECT_TRUE(m.contains("wall_clock_seconds"));
  EXPECT_EQ(m["files"].size(), 5u);
}

TEST_F(CliTest, SolveWithoutAlphaIsAvoid) {
  const fs::path cfg = Write("avoid.json", R"j({
    "system": "single_integrator",
    "grid": {"lo": [-1.5], "hi": [1.5], "counts": [101]},
    "g": "max(0, 1 - abs(x1))",
    "solver": {"checkpoints": [0, 1]}
  })j");
  ASSERT_EQ(Run({"solve", "--config", cfg.string(), "--out", (dir_ / "o").string()}),
            kExitPass);
  EXPECT_EQ(Json(dir_ / "o" / "manifest.json")["problem"], "avoid");
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const fs::path bad = Write("bad.json", "{\"system\": ");
  EXPECT_EQ(Run({"solve", "--config", bad.string(), "--out", dir_.string()}), kExitConfig);
  EXPECT_EQ(Run({"solve", "--config", (dir_ / "missing.json").string()}), kExitConfig);
  EXPECT_EQ(Run({"verify", "--config", (kConfigs / "scalar_example.json").string(), "--mode",
                 "telepathy"}),
            kExitConfig);
  EXPECT_EQ(Run({"frobnicate"}), kExitConfig);
}

TEST_F(CliTest, SolverErrorExitsThree) {
  const fs::path cfg = Write("trunc.json", R"j({
    "system": "scalar_example",
    "alpha": {"kind": "linear", "gamma": 1},
    "grid": {"lo": [-1.5], "hi": [1.5], "counts": [101]},
    "g": "max(0, 1 - abs(x1))",
    "solver": {"checkpoints": [0, 2], "max_steps": 3}
  })j");
  EXPECT_EQ(Run({"solve", "--config", cfg.string(), "--out", dir_.string()}), kExitRuntime);
}

TEST_F(CliTest, VerifyModes) {
  const std::string scalar = (kConfigs / "scalar_example.json").string();
  EXPECT_EQ(Run({"verify", "--config", scalar, "--mode", "viscosity", "--out",
                 (dir_ / "v").string()}),
            kExitPass);
  EXPECT_EQ(Json(dir_ / "v" / "report.json")["verdict"], "pass");
  EXPECT_EQ(Run({"verify", "--config", scalar, "--mode", "barrier", "--out",
                 (dir_ / "b").string()}),
            kExitPass);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "rollout_0.csv"));

  EXPECT_EQ(Run({"verify", "--config", (kConfigs / "double_integrator.json").string(), "--mode",
                 "viscosity", "--out", (dir_ / "d").string()}),
            kExitFail);
  EXPECT_FALSE(Json(dir_ / "d" / "report.json")["witnesses"].empty());

  EXPECT_EQ(Run({"verify", "--config", (kConfigs / "counterexample_2d.json").string(), "--mode",
                 "classical", "--out", (dir_ / "c").string()}),
            kExitPass);
  EXPECT_EQ(Run({"verify", "--config", (kConfigs / "single_integrator_avoid.json").string(),
                 "--mode", "avoid-invariance", "--out", (dir_ / "a").string()}),
            kExitPass);
}

TEST_F(CliTest, Counterexample) {
  ASSERT_EQ(Run({"counterexample", "--out", dir_.string()}), kExitPass);
  const nlohmann::json s = Json(dir_ / "counterexample.json");
  EXPECT_LT(s["best_min_h"].get<double>(), -1e-4);
  EXPECT_TRUE(fs::exists(dir_ / "witness_trajectory.csv"));
  EXPECT_EQ(Json(dir_ / "classical_report.json")["verdict"], "pass");
}

TEST_F(CliTest, SynthModes) {
  EXPECT_EQ(Run({"synth", "--config", (kConfigs / "scalar_max.json").string(), "--mode", "max",
                 "--out", (dir_ / "m").string()}),
            kExitPass);
  EXPECT_TRUE(fs::exists(dir_ / "m" / "h_max.csv"));

  EXPECT_EQ(Run({"synth", "--config", (kConfigs / "double_integrator.json").string(), "--mode",
                 "limit", "--out", (dir_ / "l").string()}),
            kExitPass);
  EXPECT_TRUE(fs::exists(dir_ / "l" / "h_inf.csv"));
  EXPECT_EQ(Slurp(dir_ / "l" / "convergence.csv").substr(0, 13), "T,sup_change\n");

  const fs::path short_cfg = Write("short.json", R"j({
    "system": "double_integrator",
    "alpha": {"kind": "linear", "gamma": 1},
    "grid": {"lo": [-1.5, -2], "hi": [1.5, 2], "counts": [61, 61]},
    "g": "max(0, 1 - x1*x1)",
    "synth": {"max_T": 0.5}
  })j");
  EXPECT_EQ(Run({"synth", "--config", short_cfg.string(), "--mode", "limit", "--out",
                 (dir_ / "s").string()}),
            kExitInconclusive);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::string cfg = (kConfigs / "scalar_example.json").string();
  ASSERT_EQ(Run({"verify", "--config", cfg, "--mode", "barrier", "--seed", "3", "--out",
                 (dir_ / "r1").string()}),
            kExitPass);
  ASSERT_EQ(Run({"verify", "--config", cfg, "--mode", "barrier", "--seed", "3", "--out",
                 (dir_ / "r2").string()}),
            kExitPass);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "r1")) {
    if (entry.path().extension() != ".csv") continue;
    EXPECT_EQ(Slurp(entry.path()), Slurp(dir_ / "r2" / entry.path().filename()))
        << entry.path().filename();
    ++compared;
  }
  EXPECT_GT(compared, 0);
}

TEST(SampleStatesTest, SeededAndFiltered) {
  const Grid g(MakeVec({-1.0}), MakeVec({1.0}), {11});
  auto positive = [](const Vec& x) { return x[0] > 0.0; };
  const auto a = SampleStates(g, 5, 42, positive);
  const auto b = SampleStates(g, 5, 42, positive);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], b[i]);
    EXPECT_GT(a[i][0], 0.0);
  }
  EXPECT_NE(SampleStates(g, 5, 43, positive)[0], a[0]);
}

TEST(CounterexampleTest, BoundaryStateWithZeroControlStays) {
  const System ce = BuiltinSystem("counterexample_2d")
                        .WithControls(ControlSet::Finite({MakeVec({-1}), MakeVec({0}), MakeVec({1})}),
                                      "counterexample_2d_with_zero");
  const Trajectory t =
      Flow(ce, MakeVec({1.0, 0.0}), ControlSignal::Constant(MakeVec({0.0}), 0.5), 0.5);
  for (const Vec& x : t.states) EXPECT_NEAR(x.norm(), 1.0, 1e-12);
}

}  // namespace
}  // namespace cbvf
