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

#include "cbvf/config.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "cbvf/error.h"
#include "cbvf/expression.h"
#include "cbvf/io.h"

namespace cbvf {
namespace {

std::string ErrorOf(const std::string& text) {
  try {
    ParseRunConfig(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// A valid scalar config with `patch` merged in.
std::string Patched(const std::string& patch) {
  nlohmann::json j = {{"system", "scalar_example"},
                      {"grid", {{"lo", {-1.5}}, {"hi", {1.5}}, {"counts", {31}}}},
                      {"g", "1 - abs(x1)"}};
  j.merge_patch(nlohmann::json::parse(patch));
  return j.dump(2);
}

TEST(ExpressionTest, Arithmetic) {
  const Vec x = MakeVec({0.5, -2.0});
  EXPECT_DOUBLE_EQ(Expression::Parse("1 - abs(x1)").Eval(x), 0.5);
  EXPECT_DOUBLE_EQ(Expression::Parse("-x2 * x2").Eval(x), -4.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("pow(x2, 2) / 4 + 2 * x1").Eval(x), 2.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("max(0, 1 - x1*x1 - x2*x2)").Eval(x), 0.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("min(3, x1, -x2)").Eval(x), 0.5);
  EXPECT_DOUBLE_EQ(Expression::Parse("1.5e1 + -(+x1)").Eval(x), 14.5);
  EXPECT_DOUBLE_EQ(Expression::Parse("x1 + u1").Eval(x, MakeVec({2.0})), 2.5);
}

TEST(ExpressionTest, Indices) {
  const Expression e = Expression::Parse("x3 * u2 + x1");
  EXPECT_EQ(e.max_state_index(), 3);
  EXPECT_EQ(e.max_control_index(), 2);
}

TEST(ExpressionTest, RejectsBadInput) {
  for (const char* bad : {"", "1 +", "foo(x1)", "x4", "x0", "max(1)", "(1", "1 1", "exp(x1)", "x1^2",
                          "x1 ; 2"}) {
    EXPECT_THROW(Expression::Parse(bad), ConfigError) << bad;
  }
  try {
    Expression::Parse("1 + * 2", "g");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("g"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST(BuiltinFunctionTest, Names) {
  for (const auto& name : BuiltinFunctionNames()) EXPECT_NO_THROW(BuiltinFunction(name));
  EXPECT_THROW(BuiltinFunction("bogus"), LookupError);
  EXPECT_THROW(ParseRunConfig(Patched(R"j({"g": {"builtin": "bogus"}})j")), ConfigError);
  EXPECT_THROW(ParseRunConfig(Patched(R"j({"g": {"builtin": "unit_disk"}})j")), ConfigError);
  EXPECT_DOUBLE_EQ(BuiltinFunction("unit_disk").fn(MakeVec({0.5, 0.5})), 0.5);
}

TEST(RunConfigTest, ParsesExample) {
  const RunConfig c = ParseRunConfig(R"j({
    "system": "scalar_example",
    "alpha": {"kind": "linear", "gamma": 1.0},
    "grid": {"lo": [-1.5], "hi": [1.5], "counts": [301]},
    "g": "max(0, 1 - abs(x1))",
    "solver": {"cfl": 0.4, "checkpoints": [0, 0.5, 1], "dissipation": "global",
               "stencil": "eno2"},
    "verify": {"theta": 0.8, "initial_states": [[0.1], [0.2]], "controller": "sample_hold",
               "tau": 0.05, "alphas": [{"kind": "linear", "gamma": 2}]},
    "synth": {"window": 4, "spacing": 0.5},
    "seed": 7
  })j");
  ASSERT_TRUE(c.system.has_value());
  EXPECT_EQ(c.system->name(), "scalar_example");
  EXPECT_EQ(c.grid->size(), 301);
  EXPECT_DOUBLE_EQ(c.g->fn(MakeVec({0.25})), 0.75);
  EXPECT_DOUBLE_EQ(c.solver.cfl, 0.4);
  EXPECT_EQ(c.solver.dissipation, Dissipation::kGlobal);
  EXPECT_EQ(c.solver.stencil, StencilOrder::kEno2);
  EXPECT_EQ(c.solver.checkpoints.size(), 3u);
  EXPECT_EQ(c.verify.controller, ControllerKind::kSampleHold);
  EXPECT_EQ(c.verify.initial_states.size(), 2u);
  EXPECT_EQ(c.verify.alphas.size(), 1u);
  EXPECT_EQ(c.synth.limit.window, 4);
  EXPECT_EQ(c.seed, 7u);
}

TEST(RunConfigTest, InlineSystem) {
  const RunConfig c = ParseRunConfig(R"j({
    "system": {"name": "pendulumish", "dim": 2, "f": ["x2", "-x1 + u1"],
               "controls": {"box": {"lower": [-1], "upper": [1], "sample_count": 5}}},
    "grid": {"lo": [-1, -1], "hi": [1, 1], "counts": [11, 11]},
    "g": {"builtin": "unit_disk"}
  })j");
  const Vec f = c.system->Eval(MakeVec({0.5, 2.0}), MakeVec({1.0}));
  EXPECT_DOUBLE_EQ(f[0], 2.0);
  EXPECT_DOUBLE_EQ(f[1], 0.5);
  EXPECT_FALSE(c.alpha.has_value());
  EXPECT_EQ(c.system->controls().sample_count(), 5);
}

TEST(RunConfigTest, BuiltinWithControlOverride) {
  const RunConfig c = ParseRunConfig(R"j({
    "system": {"builtin": "counterexample_2d", "controls": {"finite": [[-1], [0], [1]]}},
    "grid": {"lo": [-2, -2], "hi": [2, 2], "counts": [5, 5]},
    "g": "1 - x1*x1 - x2*x2"
  })j");
  EXPECT_EQ(c.system->controls().values().size(), 3u);
}

TEST(RunConfigTest, Diagnostics) {
  EXPECT_NE(ErrorOf("{\"system\": \"scalar_example\",\n\"bogus\": 1}").find("bogus"),
            std::string::npos);
  EXPECT_NE(ErrorOf("{\"system\": \"scalar_example\",\n\"bogus\": 1}").find("line 2"),
            std::string::npos);
  EXPECT_NE(ErrorOf("{\n\"system\": \n}").find("line"), std::string::npos);
  EXPECT_NE(ErrorOf(R"j({"grid": {"lo": [0], "hi": [1], "counts": [3]}})j").find("system"),
            std::string::npos);
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"j({"solver": {"cfl": 2}})j", "cfl"},
      {R"j({"solver": {"checkpoints": [0.5]}})j", "checkpoints"},
      {R"j({"solver": {"dissipation": "upwind"}})j", "dissipation"},
      {R"j({"alpha": {"kind": "linear", "gamma": -1}})j", "alpha"},
      {R"j({"g": "1 +"})j", "g"},
      {R"j({"g": "x2"})j", "x2"},
      {R"j({"system": "nope"})j", "system"},
      {R"j({"grid": {"lo": [0], "hi": [1, 2], "counts": [3]}})j", "grid"},
      {R"j({"grid": {"lo": [0, 0], "hi": [1, 1], "counts": [3, 3]}})j", "dimension"},
      {R"j({"verify": {"theta": 1.0}})j", "theta"},
      {R"j({"verify": {"controller": "qp"}})j", "controller"},
      {R"j({"synth": {"window": 1}})j", "window"},
      {R"j({"seed": -1})j", "seed"},
  };
  for (const auto& [patch, needle] : cases) {
    const std::string what = ErrorOf(Patched(patch));
    EXPECT_NE(what.find(needle), std::string::npos) << patch << " -> " << what;
  }
  EXPECT_NE(ErrorOf("[1, 2]").find("object"), std::string::npos) << ErrorOf("[1, 2]");
}

TEST(RunConfigTest, LoadMissingFile) {
  EXPECT_THROW(LoadRunConfig("/nonexistent/config.json"), ConfigError);
}

TEST(IoTest, FormatDouble) {
  EXPECT_EQ(FormatDouble(0.0), "0");
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::stod(FormatDouble(1e-300)), 1e-300);
}

TEST(IoTest, FieldCsvAndSidecar) {
  const Grid g(MakeVec({0.0, 0.0}), MakeVec({2.0, 2.0}), {3, 3});
  const ScalarField f(g, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8}, "h");
  const std::string csv = FieldCsv(f);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1,x2,value");
  EXPECT_NE(csv.find("\n1,2,5\n"), std::string::npos);
  const nlohmann::json side = FieldSidecar(f, 0.5);
  EXPECT_EQ(side["counts"], nlohmann::json({3, 3}));
  EXPECT_EQ(side["label"], "h");
  EXPECT_EQ(side["horizon"], 0.5);
}

TEST(IoTest, SmallCsvs) {
  EXPECT_EQ(ThetaLogCsv({{0, 0.0, 1.5}, {1, 0.1, 2.0}}),
            "interval,t_start,theta_hat\n0,0,1.5\n1,0.1,2\n");
  EXPECT_EQ(ConvergenceCsv({{0.25, 0.5}}), "T,sup_change\n0.25,0.5\n");
  Trajectory t;
  t.times = {0.0};
  t.states = {MakeVec({1.0, 2.0})};
  t.controls = {MakeVec({-1.0})};
  EXPECT_EQ(TrajectoryCsv(t), "t,x1,x2,u1\n0,1,2,-1\n");
}

}  // namespace
}  // namespace cbvf
