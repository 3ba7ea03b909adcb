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

// Run configuration (strict JSON). Top-level keys:
//
//   system  "scalar_example" | {"builtin": name, "controls": ...} |
//           {"name", "dim", "f": [expr, ...], "controls", "lipschitz_hint"}
//   alpha   class-K spec; omitted means the plain avoid problem
//   grid    {"lo": [...], "hi": [...], "counts": [...]}
//   g, h2   expression string | {"expr": s} | {"builtin": name}
//   solver  {"cfl", "checkpoints", "dissipation", "control_resolution",
//            "max_steps", "stencil"}
//   verify  {"tol", "margin_band", "theta", "horizon", "initial_states",
//            "controller", "tau", "barrier_tol", "gradient_mode",
//            "classical_samples", "classical_tol", "alphas"}
//   synth   {"window", "spacing", "tol", "max_T", "verify_checkpoints"}
//   seed    non-negative integer
//
// controls: {"finite": [[...], ...]} | {"box": {"lower", "upper",
// "sample_count"}}. Unknown keys are rejected.

#ifndef CBVF_CONFIG_H_
#define CBVF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/controller.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/solver.h"
#include "cbvf/synth.h"
#include "cbvf/verify.h"
#include "json.hpp"

namespace cbvf {

struct FunctionSpec {
  std::string description;
  std::function<double(const Vec&)> fn;
  int min_dim = 1;
};

// 1 - |x1|, 1 - x1^2 - x2^2, 1 - x1^2.
FunctionSpec BuiltinFunction(const std::string& name);
std::vector<std::string> BuiltinFunctionNames();

struct VerifyConfig {
  std::optional<double> tol;
  int margin_band = kDefaultMarginBand;
  double theta = 0.9;
  double horizon = 5.0;
  std::vector<Vec> initial_states;
  int initial_count = 5;  // used when initial_states is empty
  ControllerKind controller = ControllerKind::kGreedy;
  double tau = 0.01;
  double barrier_tol = 1e-3;
  GradientMode gradient_mode = GradientMode::kCentral;
  int classical_samples = 10000;
  double classical_tol = 1e-9;
  std::vector<ClassK> alphas;
};

struct SynthConfig {
  LimitParams limit;
  // Checkpoints of the verification solve; default: the solver checkpoints.
  std::vector<double> verify_checkpoints;
};

struct RunConfig {
  std::optional<System> system;
  nlohmann::json system_json;
  std::optional<ClassK> alpha;
  std::optional<Grid> grid;
  std::optional<FunctionSpec> g;
  std::optional<FunctionSpec> h2;
  SolverParams solver;
  VerifyConfig verify;
  SynthConfig synth;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending field and, when it can be found,
// its line.
RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace cbvf

#endif  // CBVF_CONFIG_H_
