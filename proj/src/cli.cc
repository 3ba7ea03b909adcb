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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "cbvf/error.h"
#include "cbvf/io.h"
#include "cbvf/synth.h"

namespace cbvf {

int ExitCodeFor(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return kExitPass;
    case Verdict::kFail:
      return kExitFail;
    case Verdict::kInconclusive:
      return kExitInconclusive;
  }
  return kExitRuntime;
}

std::vector<Vec> SampleStates(const Grid& grid, int count, std::uint64_t seed,
                              const std::function<bool(const Vec&)>& accept) {
  Lcg64 rng(seed);
  std::vector<Vec> out;
  const std::int64_t budget = 10000LL * std::max(1, count);
  for (std::int64_t tries = 0; static_cast<int>(out.size()) < count; ++tries) {
    if (tries >= budget) {
      throw DomainError("could not sample enough states with h(x) > 0");
    }
    Vec x(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) x[a] = rng.Uniform(grid.lo(a), grid.hi(a));
    if (accept(x)) out.push_back(x);
  }
  return out;
}

nlohmann::json SolverParamsJson(const SolverParams& p) {
  nlohmann::json j = {
      {"cfl", p.cfl},
      {"checkpoints", p.checkpoints},
      {"dissipation", p.dissipation == Dissipation::kLocal ? "local" : "global"},
      {"max_steps", p.max_steps},
      {"stencil", p.stencil == StencilOrder::kFirst ? "first" : "eno2"}};
  if (p.control_resolution) j["control_resolution"] = *p.control_resolution;
  return j;
}

nlohmann::json GridJson(const Grid& grid) {
  nlohmann::json lo = nlohmann::json::array();
  nlohmann::json hi = nlohmann::json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    lo.push_back(grid.lo(a));
    hi.push_back(grid.hi(a));
  }
  return {{"lo", lo}, {"hi", hi}, {"counts", grid.counts()}};
}

namespace {

template <class Body>
int Guarded(Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

RunConfig Load(const CliOptions& options) {
  RunConfig cfg = LoadRunConfig(options.config);
  if (options.seed) cfg.seed = *options.seed;
  return cfg;
}

const ClassK& RequireAlpha(const RunConfig& cfg, const std::string& why) {
  if (!cfg.alpha) throw ConfigError("alpha", "required for " + why);
  return *cfg.alpha;
}

ScalarField FieldOf(const RunConfig& cfg, const FunctionSpec& spec,
                    const std::string& label) {
  return Discretize(*cfg.grid, spec.fn, label);
}

InvarianceOptions InvarianceOf(const RunConfig& cfg) {
  InvarianceOptions o;
  o.tol = cfg.verify.tol;
  o.margin_band = cfg.verify.margin_band;
  return o;
}

int Finish(const CliOptions& options, const Report& report,
           const std::filesystem::path& name = "report.json") {
  WriteJsonFile(options.out / name, report.ToJson());
  if (!options.quiet) std::cout << report.Summary();
  return ExitCodeFor(report.verdict);
}

}  // namespace

int CmdSolve(const CliOptions& options) {
  return Guarded([&] {
    const RunConfig cfg = Load(options);
    const ScalarField g = FieldOf(cfg, *cfg.g, "g");
    const auto start = std::chrono::steady_clock::now();
    SolveStats stats;
    const ValueSeries series =
        cfg.alpha ? SolveCbvf(*cfg.system, *cfg.alpha, g, cfg.solver, &stats)
                  : SolveAvoid(*cfg.system, g, cfg.solver, &stats);
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const auto paths = WriteValueSeries(options.out, series);
    nlohmann::json manifest = {
        {"system", cfg.system_json},
        {"alpha", cfg.alpha ? cfg.alpha->ToJson() : nlohmann::json(nullptr)},
        {"problem", cfg.alpha ? "cbvf" : "avoid"},
        {"g", cfg.g->description},
        {"grid", GridJson(*cfg.grid)},
        {"params", SolverParamsJson(cfg.solver)},
        {"wall_clock_seconds", wall},
        {"steps", stats.steps},
        {"dt_max", stats.dt_max},
        {"exact_hamiltonian", stats.exact_hamiltonian}};
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : paths) files.push_back(p.filename().string());
    manifest["files"] = files;
    WriteJsonFile(options.out / "manifest.json", manifest);
    if (!options.quiet) {
      std::cout << "wrote " << paths.size() << " checkpoint fields to "
                << options.out.string() << " (" << stats.steps << " steps)\n";
    }
    return static_cast<int>(kExitPass);
  });
}

int CmdVerify(const CliOptions& options) {
  return Guarded([&] {
    const RunConfig cfg = Load(options);
    const System& system = *cfg.system;
    const std::string& mode = options.mode;
    if (mode == "viscosity") {
      const ClassK& alpha = RequireAlpha(cfg, "viscosity mode");
      const ScalarField h = FieldOf(cfg, *cfg.g, "h");
      ValueSeries series;
      const Report report = VerifyViscosityCbf(system, alpha, h, cfg.solver,
                                               InvarianceOf(cfg), &series);
      WriteValueSeries(options.out, series);
      return Finish(options, report);
    }
    if (mode == "classical") {
      const ClassK& alpha = RequireAlpha(cfg, "classical mode");
      const BarrierFunction h{cfg.g->fn, nullptr};
      const auto samples =
          SampleStates(*cfg.grid, cfg.verify.classical_samples, cfg.seed,
                       [](const Vec&) { return true; });
      return Finish(options, CheckClassicalCbf(system, alpha, h, samples,
                                               cfg.verify.classical_tol));
    }
    if (mode == "barrier") {
      const ClassK& alpha = RequireAlpha(cfg, "barrier mode");
      const ScalarField h = FieldOf(cfg, *cfg.g, "h");
      BarrierParams params;
      params.theta = cfg.verify.theta;
      params.horizon = cfg.verify.horizon;
      params.controller = cfg.verify.controller;
      params.tau = cfg.verify.tau;
      params.tol = cfg.verify.barrier_tol;
      params.gradient_mode = cfg.verify.gradient_mode;
      params.initial_states = cfg.verify.initial_states;
      if (params.initial_states.empty()) {
        params.initial_states =
            SampleStates(*cfg.grid, cfg.verify.initial_count, cfg.seed,
                         [&](const Vec& x) { return Interpolate(h, x) > 0.0; });
      }
      std::vector<Trajectory> rollouts;
      const Report report =
          CheckBarrierGuarantee(system, alpha, h, params, &rollouts);
      for (std::size_t i = 0; i < rollouts.size(); ++i) {
        WriteFileAtomic(options.out / ("rollout_" + std::to_string(i) + ".csv"),
                        TrajectoryCsv(rollouts[i]));
      }
      return Finish(options, report);
    }
    if (mode == "avoid-invariance") {
      const ScalarField h = FieldOf(cfg, *cfg.g, "h");
      return Finish(options, CheckAvoidTimeInvariance(system, h, cfg.verify.alphas,
                                                      cfg.solver, InvarianceOf(cfg)));
    }
    throw ConfigError("--mode", "unknown verify mode '" + mode + "'");
  });
}

CounterexampleResult RunCounterexample(const CounterexampleParams& params) {
  const System system = BuiltinSystem("counterexample_2d");
  const ClassK alpha = ClassK::Linear(1.0);
  CounterexampleResult result;

  auto h = [](const Vec& x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; };
  const BarrierFunction barrier{
      h, [](const Vec& x) { return Vec(-2.0 * x); }};
  std::vector<Vec> samples;
  const int m = params.classical_per_axis;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      samples.push_back(MakeVec({-2.0 + 4.0 * i / (m - 1), -2.0 + 4.0 * j / (m - 1)}));
    }
  }
  result.classical = CheckClassicalCbf(system, alpha, barrier, samples);
  result.classical_samples = static_cast<std::int64_t>(samples.size());

  // Family size: both initial signs times the ways to place <= max_switches
  // switches on the interior slot boundaries.
  std::int64_t family = 0;
  std::int64_t binom = 1;
  for (int k = 0; k <= params.max_switches && k <= params.slots - 1; ++k) {
    if (k > 0) binom = binom * (params.slots - k) / k;
    family += 2 * binom;
  }
  result.signals = family;

  const std::vector<Vec>& controls = system.controls().values();
  const double slot = params.horizon / params.slots;
  const int substeps =
      std::max(1, static_cast<int>(std::lround(slot / kDefaultStep)));
  const double step = slot / substeps;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> choice(params.slots, 0);
  std::vector<int> best_choice;
  auto descend = [&](auto&& self, int s, const Vec& x, int prev, int switches,
                     double running) -> void {
    for (int c = 0; c < static_cast<int>(controls.size()); ++c) {
      const int used = switches + (s > 0 && c != prev ? 1 : 0);
      if (used > params.max_switches) continue;
      Vec y = x;
      double run = running;
      for (int k = 0; k < substeps && run > best; ++k) {
        y = Rk4Step(system, y, controls[c], step);
        run = std::min(run, h(y));
      }
      if (!(run > best)) continue;
      choice[s] = c;
      if (s + 1 == params.slots) {
        best = run;
        best_choice = choice;
        ++result.rollouts;
      } else {
        self(self, s + 1, y, c, used, run);
      }
    }
  };
  descend(descend, 0, params.x0, -1, 0, h(params.x0));
  result.best_min_h = best;

  std::vector<double> switch_times;
  std::vector<Vec> values;
  for (int s = 0; s < params.slots; ++s) {
    result.best_slots.push_back(controls[best_choice[s]]);
    if (s == 0 || best_choice[s] != best_choice[s - 1]) {
      switch_times.push_back(s * slot);
      values.push_back(controls[best_choice[s]]);
    }
  }
  const ControlSignal signal(switch_times, values, params.horizon);
  result.best_trajectory = Flow(system, params.x0, signal, params.horizon, step);
  result.violated = best < params.threshold;
  return result;
}

int CmdCounterexample(const CliOptions& options) {
  return Guarded([&] {
    const CounterexampleResult r = RunCounterexample();
    WriteJsonFile(options.out / "classical_report.json", r.classical.ToJson());
    WriteFileAtomic(options.out / "witness_trajectory.csv",
                    TrajectoryCsv(r.best_trajectory));
    nlohmann::json slots = nlohmann::json::array();
    for (const Vec& u : r.best_slots) slots.push_back(u[0]);
    const nlohmann::json summary = {
        {"classical_verdict", VerdictName(r.classical.verdict)},
        {"classical_samples", r.classical_samples},
        {"classical_checked", r.classical.checked},
        {"signals", r.signals},
        {"rollouts_after_pruning", r.rollouts},
        {"best_min_h", r.best_min_h},
        {"best_slot_controls", slots},
        {"threshold", -1e-4},
        {"every_signal_violates", r.violated},
        {"passed", r.passed()}};
    WriteJsonFile(options.out / "counterexample.json", summary);
    if (!options.quiet) {
      std::cout << "classical check: " << VerdictName(r.classical.verdict)
                << " (" << r.classical_samples << " samples)\n"
                << "signals: " << r.signals << ", best min h = " << r.best_min_h
                << "\n"
                << (r.passed() ? "reproduced" : "not reproduced") << "\n";
    }
    return r.passed() ? static_cast<int>(kExitPass) : static_cast<int>(kExitFail);
  });
}

int CmdSynth(const CliOptions& options) {
  return Guarded([&] {
    const RunConfig cfg = Load(options);
    const System& system = *cfg.system;
    const ClassK& alpha = RequireAlpha(cfg, "synth");
    if (options.mode == "max") {
      if (!cfg.h2) throw ConfigError("h2", "required for max mode");
      const ScalarField h1 = FieldOf(cfg, *cfg.g, "h1");
      const ScalarField h2 = FieldOf(cfg, *cfg.h2, "h2");
      const double tol = cfg.verify.tol.value_or(
          std::max(DefaultInvarianceTolerance(ClampNonneg(h1)),
                   DefaultInvarianceTolerance(ClampNonneg(h2))));
      InvarianceOptions single = InvarianceOf(cfg);
      single.tol = tol;
      InvarianceOptions doubled = single;
      doubled.tol = 2.0 * tol;
      const Report r1 = VerifyViscosityCbf(system, alpha, h1, cfg.solver, single);
      const Report r2 = VerifyViscosityCbf(system, alpha, h2, cfg.solver, single);
      const ScalarField hmax = PointwiseMax(h1, h2);
      Report report = VerifyViscosityCbf(system, alpha, hmax, cfg.solver, doubled);
      report.details["h1"] = {{"verdict", VerdictName(r1.verdict)},
                              {"max_violation", r1.max_violation}};
      report.details["h2"] = {{"verdict", VerdictName(r2.verdict)},
                              {"max_violation", r2.max_violation}};
      if (!r1.passed() || !r2.passed()) {
        report.notes.push_back("an input field does not pass on its own");
      }
      WriteField(options.out, "h_max", hmax, 0.0);
      return Finish(options, report);
    }
    if (options.mode == "limit") {
      const ScalarField g = FieldOf(cfg, *cfg.g, "g");
      SolverParams verify_params = cfg.solver;
      if (!cfg.synth.verify_checkpoints.empty()) {
        verify_params.checkpoints = cfg.synth.verify_checkpoints;
      }
      LimitParams limit = cfg.synth.limit;
      if (!limit.tol && cfg.verify.tol) limit.tol = cfg.verify.tol;
      LimitResult r =
          LimitCbvf(system, alpha, g, cfg.solver, limit, verify_params);
      WriteFileAtomic(options.out / "convergence.csv", ConvergenceCsv(r.history));
      WriteField(options.out, "h_inf", r.h_inf, r.T_final);
      if (r.converged && r.fixed_point_residual &&
          *r.fixed_point_residual > 2.0 * r.tol) {
        r.verification.verdict = Verdict::kFail;
        r.verification.notes.push_back("fixed-point residual exceeds 2 tol");
      }
      return Finish(options, r.verification);
    }
    throw ConfigError("--mode", "unknown synth mode '" + options.mode + "'");
  });
}

int RunCli(int argc, char** argv) {
  CLI::App app{"Control barrier value function toolkit"};
  app.require_subcommand(1);
  CliOptions options;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", options.config, "run configuration (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "output directory");
    sub->add_option("--seed", seed, "seed for sampled states");
    sub->add_flag("--quiet", options.quiet, "suppress the summary");
  };
  auto* solve = app.add_subcommand("solve", "solve the CB-VF or the avoid problem");
  common(solve, true);
  auto* verify = app.add_subcommand("verify", "run a barrier-function check");
  common(verify, true);
  verify->add_option("--mode", options.mode)
      ->required()
      ->check(CLI::IsMember({"viscosity", "classical", "barrier", "avoid-invariance"}));
  auto* counter = app.add_subcommand("counterexample",
                                     "classical CBF that is not control invariant");
  common(counter, false);
  auto* synth = app.add_subcommand("synth", "build new barrier functions");
  common(synth, true);
  synth->add_option("--mode", options.mode)->required()->check(CLI::IsMember({"max", "limit"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kExitConfig);
  }
  for (auto* sub : {solve, verify, counter, synth}) {
    if (sub->count("--seed") > 0) options.seed = seed;
  }
  std::error_code ec;
  std::filesystem::create_directories(options.out, ec);
  if (ec) {
    std::cerr << "cannot create " << options.out.string() << ": " << ec.message() << "\n";
    return kExitRuntime;
  }
  if (*solve) return CmdSolve(options);
  if (*verify) return CmdVerify(options);
  if (*counter) return CmdCounterexample(options);
  return CmdSynth(options);
}

}  // namespace cbvf
