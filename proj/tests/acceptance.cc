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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/cli.h"
#include "cbvf/controller.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/io.h"
#include "cbvf/solver.h"
#include "cbvf/synth.h"
#include "cbvf/verify.h"
#include "test_util.h"

namespace cbvf {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SolverParams Checkpoints(std::vector<double> t) {
  SolverParams p;
  p.checkpoints = std::move(t);
  return p;
}

Grid ScalarGrid() { return testing::Grid1D(-1.5, 1.5, 301); }

Grid DoubleIntegratorGrid() {
  return Grid(MakeVec({-1.5, -2.0}), MakeVec({1.5, 2.0}), {101, 101});
}

double Tent(const Vec& x) { return std::max(0.0, 1.0 - std::abs(x[0])); }
double Slab(const Vec& x) { return std::max(0.0, 1.0 - x[0] * x[0]); }

// 1. Class-K engine identities on >= 1000 samples per alpha, < 5 s.
Outcome Criterion1(const fs::path&) {
  const auto start = Clock::now();
  constexpr int kSamples = 1000;
  int failures = 0;
  double worst_semigroup = 0.0, worst_inverse = 0.0, worst_deriv = 0.0;
  for (const auto& [name, alpha] : testing::BundledAlphas()) {
    Lcg64 rng(101);
    const double L = alpha.ComparisonConstant(10.0);
    for (int i = 0; i < kSamples; ++i) {
      const double r = rng.Uniform(0.1, 5.0);
      const double s = rng.Uniform(0.0, 3.0);
      const double t = rng.Uniform(0.1, 3.0);
      const double b = alpha.Beta(r, t);

      const double semi = std::abs(alpha.Beta(alpha.Beta(r, s), t) - alpha.Beta(r, s + t));
      worst_semigroup = std::max(worst_semigroup, semi);
      if (semi > 1e-6) ++failures;

      if (b < r * std::exp(-L * t) - 1e-9) ++failures;

      const double dt = 1e-4, dr = 1e-4 * r;
      const double bt = (alpha.Beta(r, t + dt) - alpha.Beta(r, t - dt)) / (2 * dt);
      const double br = (alpha.Beta(r + dr, t) - alpha.Beta(r - dr, t)) / (2 * dr);
      const double et = std::abs(bt + alpha(b)) / alpha(b);
      const double er = std::abs(br - alpha(b) / alpha(r)) / (alpha(b) / alpha(r));
      worst_deriv = std::max({worst_deriv, et, er});
      if (et > 1e-3 || er > 1e-3) ++failures;

      const KappaResult k = alpha.Kappa(r, t);
      if (!k.blew_up && k.value < 1e6) {
        const double inv = std::abs(alpha.Beta(k.value, t) - r);
        worst_inverse = std::max(worst_inverse, inv);
        if (inv > 1e-5) ++failures;
        if (k.escape_time > 2 * t) {
          const double kt =
              (alpha.Kappa(r, t + dt).value - alpha.Kappa(r, t - dt).value) / (2 * dt);
          const double ek = std::abs(kt - alpha(k.value)) / alpha(k.value);
          worst_deriv = std::max(worst_deriv, ek);
          if (ek > 1e-3) ++failures;
        }
      }
    }
  }
  const double secs = Seconds(start);
  Outcome o;
  o.pass = failures == 0 && secs < 5.0;
  o.detail = std::to_string(failures) + " violations; semigroup " +
             Fmt("%.2e", worst_semigroup) + ", inverse " + Fmt("%.2e", worst_inverse) +
             ", derivative rel " + Fmt("%.2e", worst_deriv) + ", " + Fmt("%.2f s", secs);
  return o;
}

// 2. PDE vs trajectory oracle on scalar_example at 20 interior nodes.
Outcome Criterion2(const fs::path& out) {
  const auto start = Clock::now();
  const System s = BuiltinSystem("scalar_example");
  const ClassK alpha = ClassK::Linear(1.0);
  const Grid grid = ScalarGrid();
  const ScalarField g = Discretize(grid, Tent, "g");
  const ValueSeries series = SolveCbvf(s, alpha, g, Checkpoints({0.0, 0.5, 1.0}));
  WriteValueSeries(out / "c2", series);

  OracleParams op;
  op.num_intervals = 4;
  op.control_values = {MakeVec({-1.0}), MakeVec({1.0})};
  double worst = 0.0;
  int compared = 0;
  std::ostringstream csv;
  csv << "x,T,pde,oracle\n";
  for (int k = 0; k < 20; ++k) {
    const std::int64_t node = 55 + 10 * k;  // x = -0.95, -0.85, ..., 0.95
    const Vec x = grid.Point(node);
    for (std::size_t c = 1; c < series.checkpoints.size(); ++c) {
      const double T = series.checkpoints[c];
      const double pde = series.fields[c].values[node];
      const double oracle = CbvfOracle(s, alpha, Tent, x, T, op).value;
      worst = std::max(worst, std::abs(pde - oracle));
      ++compared;
      csv << FormatDouble(x[0]) << ',' << FormatDouble(T) << ',' << FormatDouble(pde) << ','
          << FormatDouble(oracle) << '\n';
    }
  }
  WriteFileAtomic(out / "c2" / "oracle_comparison.csv", csv.str());
  const double secs = Seconds(start);
  return {worst <= 0.05 && compared == 40 && secs < 120.0,
          std::to_string(compared) + " comparisons, max |pde - oracle| " + Fmt("%.4f", worst) +
              " (tol 0.05), " + Fmt("%.2f s", secs)};
}

// 3. scalar_example passes time invariance at 0.02 with a 3-cell band.
Outcome Criterion3(const fs::path& out) {
  const auto start = Clock::now();
  ValueSeries series;
  InvarianceOptions opt;
  opt.tol = 0.02;
  opt.margin_band = 3;
  const Report r =
      VerifyViscosityCbf(BuiltinSystem("scalar_example"), ClassK::Linear(1.0),
                         Discretize(ScalarGrid(), testing::OneMinusAbs, "h"),
                         Checkpoints({0.0, 0.5, 1.0, 1.5, 2.0}), opt, &series);
  WriteValueSeries(out / "c3", series);
  const double secs = Seconds(start);
  return {r.passed() && secs < 60.0,
          std::string(VerdictName(r.verdict)) + ", max deviation " +
              Fmt("%.3e", r.max_violation) + " (tol 0.02), " + Fmt("%.2f s", secs)};
}

// 4. double_integrator fails, and the oracle confirms the witness decay.
Outcome Criterion4(const fs::path& out) {
  const auto start = Clock::now();
  const System s = BuiltinSystem("double_integrator");
  const ClassK alpha = ClassK::Linear(1.0);
  const ScalarField g = Discretize(DoubleIntegratorGrid(), Slab, "g");
  const ValueSeries series = SolveCbvf(s, alpha, g, Checkpoints({0.0, 0.5, 1.0, 1.5, 2.0}));
  WriteValueSeries(out / "c4", series);
  const Report r = CheckTimeInvariance(series, g, DefaultInvarianceTolerance(g));
  if (r.verdict != Verdict::kFail || r.witnesses.empty()) {
    return {false, std::string("time invariance verdict ") + VerdictName(r.verdict)};
  }
  const Witness& w = r.witnesses.front();
  OracleParams op;
  op.num_intervals = 6;
  const double oracle = CbvfOracle(s, alpha, Slab, w.x, w.t_or_T, op).value;
  const double gap = std::abs(oracle - w.measured);
  const double tol = r.tolerances["invariance"].get<double>();
  const bool decays = oracle < Slab(w.x) - tol;
  const double secs = Seconds(start);
  std::ostringstream d;
  d << "fail with " << r.witnesses.size() << " witnesses; worst x=(" << FormatDouble(w.x[0])
    << ", " << FormatDouble(w.x[1]) << ") T=" << FormatDouble(w.t_or_T) << " g="
    << Fmt("%.4f", Slab(w.x)) << " pde=" << Fmt("%.4f", w.measured)
    << " oracle=" << Fmt("%.4f", oracle) << " |diff| " << Fmt("%.4f", gap) << " (tol 0.05), "
    << Fmt("%.2f s", secs);
  return {decays && gap <= 0.05 && secs < 300.0, d.str()};
}

// 5. The criterion-3 instance satisfies the Barrier Guarantee.
Outcome Criterion5(const fs::path& out) {
  const auto start = Clock::now();
  const System s = BuiltinSystem("scalar_example");
  const ClassK alpha = ClassK::Linear(1.0);
  const ScalarField h = Discretize(ScalarGrid(), Tent, "h");
  BarrierParams p;
  p.theta = 0.9;
  p.horizon = 5.0;
  p.initial_states = SampleStates(h.grid, 8, 7, [&](const Vec& x) {
    return Interpolate(h, x) > 0.0;
  });
  std::vector<Trajectory> rollouts;
  const Report greedy = CheckBarrierGuarantee(s, alpha, h, p, &rollouts);
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    WriteFileAtomic(out / "c5" / ("rollout_" + std::to_string(i) + ".csv"),
                    TrajectoryCsv(rollouts[i]));
  }

  const SampleHoldController hold(GreedyController(s, h), 0.01, 0.9);
  double min_theta_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.initial_states.size(); ++i) {
    const Rollout r = hold.Run(alpha, p.initial_states[i], p.horizon);
    for (const auto& e : r.theta_log) min_theta_hat = std::min(min_theta_hat, e.theta_hat);
    WriteFileAtomic(out / "c5" / ("theta_log_" + std::to_string(i) + ".csv"),
                    ThetaLogCsv(r.theta_log));
  }
  const double secs = Seconds(start);
  return {greedy.passed() && p.initial_states.size() >= 5 && min_theta_hat >= 1.0,
          std::to_string(p.initial_states.size()) + " seeded states, greedy " +
              VerdictName(greedy.verdict) + ", min theta_hat (tau=0.01) " +
              Fmt("%.5f", min_theta_hat) + ", " + Fmt("%.2f s", secs)};
}

// 6. Non-invariance of the unit disk under bang-bang controls.
Outcome Criterion6(const fs::path& out) {
  const auto start = Clock::now();
  const CounterexampleResult r = RunCounterexample();
  WriteFileAtomic(out / "c6" / "witness_trajectory.csv", TrajectoryCsv(r.best_trajectory));
  const double secs = Seconds(start);
  return {r.passed() && r.classical_samples >= 10000 && secs < 60.0,
          std::string("classical ") + VerdictName(r.classical.verdict) + " on " +
              std::to_string(r.classical_samples) + " samples; " + std::to_string(r.signals) +
              " signals, best min h " + Fmt("%.5f", r.best_min_h) + " (< -1e-4), " +
              Fmt("%.2f s", secs)};
}

// 7. max of two passing scalar_example fields passes at twice the tolerance.
Outcome Criterion7(const fs::path& out) {
  const auto start = Clock::now();
  const System s = BuiltinSystem("scalar_example");
  const ClassK alpha = ClassK::Linear(1.0);
  const SolverParams p = Checkpoints({0.0, 0.5, 1.0, 1.5, 2.0});
  const ScalarField h1 = Discretize(ScalarGrid(), testing::OneMinusAbs, "h1");
  const ScalarField h2 =
      Discretize(ScalarGrid(), [](const Vec& x) { return 0.8 * (1.0 - x[0] * x[0]); }, "h2");
  const double tol = std::max(DefaultInvarianceTolerance(ClampNonneg(h1)),
                              DefaultInvarianceTolerance(ClampNonneg(h2)));
  InvarianceOptions single;
  single.tol = tol;
  const Report r1 = VerifyViscosityCbf(s, alpha, h1, p, single);
  const Report r2 = VerifyViscosityCbf(s, alpha, h2, p, single);
  InvarianceOptions twice;
  twice.tol = 2.0 * tol;
  const ScalarField hmax = PointwiseMax(h1, h2);
  ValueSeries series;
  const Report rm = VerifyViscosityCbf(s, alpha, hmax, p, twice, &series);
  WriteField(out / "c7", "h_max", hmax, 0.0);
  WriteValueSeries(out / "c7", series);
  const double secs = Seconds(start);
  return {r1.passed() && r2.passed() && rm.passed(),
          std::string("h1 ") + VerdictName(r1.verdict) + ", h2 " + VerdictName(r2.verdict) +
              " at tol " + Fmt("%.4f", tol) + "; max " + VerdictName(rm.verdict) +
              " with deviation " + Fmt("%.3e", rm.max_violation) + " at 2 tol, " +
              Fmt("%.2f s", secs)};
}

// 8. Horizon limit on double_integrator.
Outcome Criterion8(const fs::path& out) {
  const auto start = Clock::now();
  const ScalarField g = Discretize(DoubleIntegratorGrid(), Slab, "g");
  LimitParams lp;
  lp.window = 5;
  lp.spacing = 0.25;
  lp.max_T = 10.0;
  const LimitResult r =
      LimitCbvf(BuiltinSystem("double_integrator"), ClassK::Linear(1.0), g, SolverParams{}, lp,
                Checkpoints({0.0, 0.5, 1.0, 1.5, 2.0}));
  WriteFileAtomic(out / "c8" / "convergence.csv", ConvergenceCsv(r.history));
  WriteField(out / "c8", "h_inf", r.h_inf, r.T_final);
  const double residual = r.fixed_point_residual.value_or(
      std::numeric_limits<double>::infinity());
  const double secs = Seconds(start);
  return {r.converged && r.T_converge < 10.0 && r.verification.passed() &&
              residual <= 2.0 * r.tol && secs < 600.0,
          std::string(r.converged ? "converged" : "did not converge") + " at T=" +
              FormatDouble(r.T_converge) + " (tol " + Fmt("%.4f", r.tol) + "), verify " +
              VerdictName(r.verification.verdict) + ", fixed-point residual " +
              Fmt("%.3e", residual) + ", " + Fmt("%.2f s", secs)};
}

std::map<std::string, std::string> CsvFiles(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

int Main(int argc, char** argv) {
  const fs::path root =
      argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "cbvf_acceptance";
  fs::remove_all(root);

  const std::vector<std::pair<std::string, std::function<Outcome(const fs::path&)>>> criteria = {
      {"class-K engine identities", Criterion1},
      {"PDE vs trajectory oracle", Criterion2},
      {"time invariance of the scalar example", Criterion3},
      {"double integrator decay witness", Criterion4},
      {"barrier guarantee rollouts", Criterion5},
      {"bang-bang counterexample", Criterion6},
      {"pointwise max", Criterion7},
      {"horizon-limit synthesis", Criterion8},
  };
  int failed = 0;
  auto report = [&](int n, const std::string& name, const Outcome& o) {
    std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second(root / "run1");
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(static_cast<int>(i + 1), criteria[i].first, o);
  }

  // 9. Byte-identical CSVs when criteria 2-8 run again.
  Outcome d;
  try {
    for (std::size_t i = 1; i < criteria.size(); ++i) criteria[i].second(root / "run2");
    const auto a = CsvFiles(root / "run1");
    const auto b = CsvFiles(root / "run2");
    int mismatched = 0;
    for (const auto& [name, content] : a) {
      const auto it = b.find(name);
      if (it == b.end() || it->second != content) ++mismatched;
    }
    d.pass = !a.empty() && a.size() == b.size() && mismatched == 0;
    d.detail = std::to_string(a.size()) + " CSV files compared, " + std::to_string(mismatched) +
               " differ";
  } catch (const std::exception& e) {
    d = {false, std::string("exception: ") + e.what()};
  }
  report(9, "determinism", d);

  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace cbvf

int main(int argc, char** argv) { return cbvf::Main(argc, argv); }
