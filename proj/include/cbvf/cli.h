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

#ifndef CBVF_CLI_H_
#define CBVF_CLI_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbvf/config.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/solver.h"
#include "cbvf/verify.h"

namespace cbvf {

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitInconclusive = 4,
};

int ExitCodeFor(Verdict verdict);

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::string mode;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int CmdSolve(const CliOptions& options);
// mode: viscosity | classical | barrier | avoid-invariance
int CmdVerify(const CliOptions& options);
int CmdCounterexample(const CliOptions& options);
// mode: max | limit
int CmdSynth(const CliOptions& options);

// Parses argv with subcommands solve, verify, counterexample, synth.
int RunCli(int argc, char** argv);

// `count` states drawn uniformly from the grid box with the seeded LCG,
// keeping those where `accept` holds. Throws DomainError when acceptance is
// too rare.
std::vector<Vec> SampleStates(const Grid& grid, int count, std::uint64_t seed,
                              const std::function<bool(const Vec&)>& accept);

nlohmann::json SolverParamsJson(const SolverParams& params);
nlohmann::json GridJson(const Grid& grid);

struct CounterexampleParams {
  Vec x0 = MakeVec({1.0, 0.0});
  double horizon = 0.5;
  int slots = 20;  // switch instants are multiples of horizon / slots
  int max_switches = 6;
  double threshold = -1e-4;
  int classical_per_axis = 100;  // samples on [-2, 2]^2
};

struct CounterexampleResult {
  Report classical;
  std::int64_t classical_samples = 0;
  // max over enumerated signals of min_t h(x(t)).
  double best_min_h = 0.0;
  std::vector<Vec> best_slots;  // control per slot of the maximizing signal
  Trajectory best_trajectory;
  std::int64_t signals = 0;  // size of the enumerated family
  std::int64_t rollouts = 0;  // complete signals evaluated after pruning
  bool violated = false;  // every signal dips below the threshold
  bool passed() const { return classical.passed() && violated; }
};

// Classical CBF check of h = 1 - x1^2 - x2^2 on counterexample_2d, then a
// branch-and-bound search over bang-bang signals with switches on the slot
// grid, from x0.
CounterexampleResult RunCounterexample(const CounterexampleParams& params = {});

}  // namespace cbvf

#endif  // CBVF_CLI_H_
