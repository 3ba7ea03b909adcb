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

#include "cbvf/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbvf/io.h"
#include "cbvf/parallel.h"

namespace cbvf {
namespace {

constexpr double kMinStep = 1e-9;
// Above this many cached doubles the velocity table is recomputed per stage.
constexpr std::int64_t kVelocityCacheLimit = 60'000'000;

void CheckCheckpoints(const std::vector<double>& checkpoints) {
  if (checkpoints.empty() || checkpoints.front() != 0.0) {
    throw DomainError("checkpoint horizons must start at 0");
  }
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > checkpoints[i - 1]) ||
        !std::isfinite(checkpoints[i])) {
      throw DomainError("checkpoint horizons must be strictly increasing");
    }
  }
}

std::vector<Vec> SolverProbeStates(const Grid& grid) {
  std::vector<Vec> probes = DefaultProbeStates(grid.dim());
  probes.push_back(grid.lo());
  probes.push_back(grid.hi());
  probes.push_back(0.5 * (grid.lo() + grid.hi()));
  return probes;
}

}  // namespace

double HamMax(const System& system, const Vec& x, const Vec& lam) {
  if (lam.size() != system.dim() || x.size() != system.dim()) {
    throw DomainError("costate/state dimension mismatch");
  }
  return ControlMaximizer(system).Max(system, x, lam);
}

double HamAlpha(const System& system, const ClassK& alpha, const Vec& x,
                double r, const Vec& lam) {
  return HamMax(system, x, lam) + alpha(r);
}

CbvfMarcher::CbvfMarcher(const System& system, std::optional<ClassK> alpha,
                         ScalarField g, const SolverParams& params)
    : system_(system),
      alpha_(std::move(alpha)),
      g_(std::move(g)),
      v_(g_),
      params_(params) {
  const Grid& grid = g_.grid;
  if (grid.dim() != system_.dim()) {
    throw ShapeError("grid dimension does not match the system");
  }
  if (!(params_.cfl > 0.0 && params_.cfl <= 1.0)) {
    throw DomainError("cfl must lie in (0, 1]");
  }
  for (std::size_t n = 0; n < g_.values.size(); ++n) {
    if (!(g_.values[n] >= 0.0)) {
      throw DomainError(
          "g is negative at node " + std::to_string(n) +
          "; apply ClampNonneg (max{0, h} carries the same barrier "
          "information)");
    }
  }

  dim_ = grid.dim();
  const std::int64_t N = grid.size();
  const auto probes = SolverProbeStates(grid);
  const ControlMaximizer maximizer(system_, probes, params_.control_resolution);
  stats_.control_affine = maximizer.control_affine();
  stats_.exact_hamiltonian = maximizer.exact();
  const auto& candidates = maximizer.candidates();
  num_candidates_ = static_cast<int>(candidates.size());

  const std::int64_t cache = N * num_candidates_ * dim_;
  if (cache > kVelocityCacheLimit) {
    throw CapacityError("velocity table of " + std::to_string(cache) +
                        " entries exceeds the solver limit");
  }
  velocities_.resize(static_cast<std::size_t>(cache));
  sigma_.assign(static_cast<std::size_t>(N * dim_), 0.0);
  faces_.assign(static_cast<std::size_t>(N), 0);
  ParallelFor(N, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t n = begin; n < end; ++n) {
      const Vec x = grid.Point(n);
      const MultiIndex idx = grid.Unflatten(n);
      unsigned char faces = 0;
      for (int a = 0; a < dim_; ++a) {
        if (idx[a] == 0) faces |= 1u << (2 * a);
        if (idx[a] == grid.count(a) - 1) faces |= 1u << (2 * a + 1);
      }
      faces_[n] = faces;
      for (int k = 0; k < num_candidates_; ++k) {
        const Vec f = system_.EvalUnchecked(x, candidates[k]);
        for (int a = 0; a < dim_; ++a) {
          velocities_[(n * num_candidates_ + k) * dim_ + a] = f[a];
          sigma_[n * dim_ + a] = std::max(sigma_[n * dim_ + a], std::abs(f[a]));
        }
      }
    }
  });
  for (double s : velocities_) {
    if (!std::isfinite(s)) throw OverflowError("dynamics not finite on grid");
  }

  std::vector<double> sigma_max(dim_, 0.0);
  for (std::int64_t n = 0; n < N; ++n) {
    for (int a = 0; a < dim_; ++a) {
      sigma_max[a] = std::max(sigma_max[a], sigma_[n * dim_ + a]);
    }
  }
  if (params_.dissipation == Dissipation::kGlobal) {
    for (std::int64_t n = 0; n < N; ++n) {
      for (int a = 0; a < dim_; ++a) sigma_[n * dim_ + a] = sigma_max[a];
    }
  }
  double rate = alpha_ ? alpha_->SlopeBound(g_.Max()) : 0.0;
  for (int a = 0; a < dim_; ++a) rate += sigma_max[a] / grid.spacing(a);
  stats_.dt_max = rate > 0.0 ? params_.cfl / rate
                             : std::numeric_limits<double>::infinity();
  work_a_.resize(static_cast<std::size_t>(N));
  work_b_.resize(static_cast<std::size_t>(N));
}

void CbvfMarcher::Operator(const std::vector<double>& v,
                           std::vector<double>& out) const {
  const Grid& grid = g_.grid;
  const std::int64_t N = grid.size();
  const int d = dim_;
  const int K = num_candidates_;

  UpwindGradients eno;
  if (params_.stencil == StencilOrder::kEno2) {
    eno = ComputeUpwindGradients(ScalarField(grid, v), StencilOrder::kEno2);
  }

  ParallelFor(N, [&](std::int64_t begin, std::int64_t end) {
    std::array<double, kMaxDim> avg{};
    std::array<double, kMaxDim> jump{};
    for (std::int64_t n = begin; n < end; ++n) {
      for (int a = 0; a < d; ++a) {
        double left;
        double right;
        if (params_.stencil == StencilOrder::kEno2) {
          left = eno.left[n * d + a];
          right = eno.right[n * d + a];
        } else {
          const std::int64_t s = grid.stride(a);
          const double inv = 1.0 / grid.spacing(a);
          const bool lower = faces_[n] & (1u << (2 * a));
          const bool upper = faces_[n] & (1u << (2 * a + 1));
          // Linear ghost extrapolation: the missing difference copies the
          // interior one.
          left = lower ? (v[n + s] - v[n]) * inv : (v[n] - v[n - s]) * inv;
          right = upper ? left : (v[n + s] - v[n]) * inv;
          if (lower) left = right;
        }
        avg[a] = 0.5 * (left + right);
        jump[a] = 0.5 * (right - left);
      }
      double ham = -std::numeric_limits<double>::infinity();
      const double* vel = &velocities_[static_cast<std::size_t>(n * K * d)];
      for (int k = 0; k < K; ++k) {
        double dot = 0.0;
        for (int a = 0; a < d; ++a) dot += avg[a] * vel[k * d + a];
        ham = std::max(ham, dot);
      }
      double diss = 0.0;
      for (int a = 0; a < d; ++a) diss += sigma_[n * d + a] * jump[a];
      const double source = alpha_ ? (*alpha_)(v[n]) : 0.0;
      out[n] = ham + source + diss;
    }
  });
}

void CbvfMarcher::Stage(const std::vector<double>& from, double dt,
                        std::vector<double>& to) const {
  Operator(from, to);
  const auto& g = g_.values;
  for (std::size_t n = 0; n < to.size(); ++n) {
    to[n] = std::clamp(from[n] + dt * to[n], 0.0, g[n]);
  }
}

void CbvfMarcher::AdvanceTo(double T) {
  const double span = T - time_;
  if (!(span > 0.0)) {
    if (span < 0.0) throw DomainError("cannot march backwards in time");
    return;
  }
  const auto steps = static_cast<std::int64_t>(
      std::max(1.0, std::ceil(span / stats_.dt_max - 1e-12)));
  const double dt = span / static_cast<double>(steps);
  if (dt < kMinStep) {
    throw StiffnessError("CFL step " + FormatDouble(dt) +
                         " is below the stiffness floor");
  }
  if (stats_.steps + steps > params_.max_steps) {
    throw TruncationError("max_steps exceeded before T = " + FormatDouble(T),
                          ValueSeries{});
  }
  auto& v = v_.values;
  const auto& g = g_.values;
  for (std::int64_t k = 0; k < steps; ++k) {
    Stage(v, dt, work_a_);
    Stage(work_a_, dt, work_b_);
    for (std::size_t n = 0; n < v.size(); ++n) {
      v[n] = std::clamp(0.5 * (v[n] + work_b_[n]), 0.0, g[n]);
    }
  }
  stats_.steps += steps;
  time_ = T;
}

namespace {

ValueSeries March(const System& system, std::optional<ClassK> alpha,
                  const ScalarField& g, const SolverParams& params,
                  SolveStats* stats) {
  CheckCheckpoints(params.checkpoints);
  CbvfMarcher marcher(system, std::move(alpha), g, params);
  ValueSeries series;
  series.checkpoints.push_back(0.0);
  series.fields.push_back(g);
  for (std::size_t k = 1; k < params.checkpoints.size(); ++k) {
    try {
      marcher.AdvanceTo(params.checkpoints[k]);
    } catch (const TruncationError& e) {
      if (stats) *stats = marcher.stats();
      throw TruncationError(e.what(), series);
    }
    series.checkpoints.push_back(params.checkpoints[k]);
    series.fields.push_back(marcher.current());
  }
  if (stats) *stats = marcher.stats();
  return series;
}

}  // namespace

ValueSeries SolveCbvf(const System& system, const ClassK& alpha,
                      const ScalarField& g, const SolverParams& params,
                      SolveStats* stats) {
  return March(system, alpha, g, params, stats);
}

ValueSeries SolveAvoid(const System& system, const ScalarField& g,
                       const SolverParams& params, SolveStats* stats) {
  return March(system, std::nullopt, g, params, stats);
}

namespace {

// Depth-first enumeration of piecewise-constant signals sharing prefixes.
// `payoff(g, remaining)` maps the safety value at a sample to the payoff.
template <class Payoff>
OracleResult Enumerate(const System& system, const StateFunction& g_fn,
                       const Vec& x0, double T, const OracleParams& params,
                       Payoff payoff) {
  if (params.num_intervals < 1) throw DomainError("num_intervals must be >= 1");
  if (!(T >= 0.0)) throw DomainError("oracle horizon must be >= 0");
  const std::vector<Vec> controls = params.control_values.empty()
                                        ? system.controls().OracleValues()
                                        : params.control_values;
  for (const auto& u : controls) {
    if (!system.controls().Contains(u)) {
      throw DomainError("oracle control value outside U");
    }
  }
  double total = 1.0;
  for (int i = 0; i < params.num_intervals; ++i) {
    total *= static_cast<double>(controls.size());
    if (total > static_cast<double>(kOracleGuard)) {
      throw CapacityError("oracle enumeration exceeds the 1e7 signal guard");
    }
  }

  auto safety = [&](const Vec& x) {
    const double value = g_fn(x);
    if (value < 0.0 || std::isnan(value)) {
      throw DomainError("oracle safety function must be nonnegative");
    }
    return value;
  };

  OracleResult result;
  const double g0 = safety(x0);
  const double start = payoff(g0, T);
  if (T == 0.0) {
    result.payoff = start;
    return result;
  }

  const double interval = T / params.num_intervals;
  const int substeps = std::max(
      1, static_cast<int>(std::ceil(params.time_samples_per_unit * interval)));
  const double h = interval / substeps;

  double best = -std::numeric_limits<double>::infinity();
  std::vector<Vec> sequence;
  auto descend = [&](auto&& self, int level, const Vec& x,
                     double running) -> void {
    for (const Vec& u : controls) {
      Vec y = x;
      double run = running;
      for (int s = 1; s <= substeps && run > best; ++s) {
        y = Rk4Step(system, y, u, h);
        if (!y.allFinite() || y.norm() > kDivergenceNorm) {
          throw DivergenceError("oracle rollout diverged");
        }
        const double t = level * interval + s * h;
        run = std::min(run, payoff(safety(y), std::max(0.0, T - t)));
      }
      // Prefixes that cannot beat the incumbent are dropped; ties keep the
      // earlier (lexicographically smaller) sequence.
      if (!(run > best)) continue;
      sequence.push_back(u);
      if (level + 1 == params.num_intervals) {
        best = run;
        result.best_sequence = sequence;
      } else {
        self(self, level + 1, y, run);
      }
      sequence.pop_back();
    }
  };
  descend(descend, 0, x0, start);
  result.payoff = best;
  return result;
}

}  // namespace

OracleResult CbvfOracle(const System& system, const ClassK& alpha,
                        const StateFunction& g_fn, const Vec& x, double T,
                        const OracleParams& params) {
  OracleResult result =
      Enumerate(system, g_fn, x, T, params,
                [&](double g, double remaining) { return alpha.Beta(g, remaining); });
  const double gx = g_fn(x);
  if (T == 0.0 || gx == 0.0) {
    result.value = gx;
    return result;
  }
  if (result.payoff >= alpha.Beta(gx, T)) {
    result.value = gx;
    return result;
  }
  double lo = 0.0;
  double hi = gx;
  while (hi - lo > params.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    if (alpha.Beta(mid, T) <= result.payoff) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.value = 0.5 * (lo + hi);
  return result;
}

OracleResult AvoidOracle(const System& system, const StateFunction& g_fn,
                         const Vec& x, double T, const OracleParams& params) {
  OracleResult result = Enumerate(system, g_fn, x, T, params,
                                  [](double g, double) { return g; });
  result.value = result.payoff;
  return result;
}

TransformCheckResult TransformCheck(const ValueSeries& series,
                                    const ScalarField& g, const ClassK& alpha) {
  TransformCheckResult out;
  for (std::size_t k = 0; k < series.fields.size(); ++k) {
    const ScalarField& v = series.fields[k];
    if (!(v.grid == g.grid)) throw ShapeError("series and g grids differ");
    const double T = series.checkpoints[k];
    for (std::size_t n = 0; n < v.values.size(); ++n) {
      const double w = alpha.Beta(std::max(0.0, v.values[n]), T);
      const double bound = alpha.Beta(std::max(0.0, g.values[n]), T);
      const double violation = w - bound;
      if (violation > out.max_violation) {
        out.max_violation = violation;
        out.worst_node = static_cast<std::int64_t>(n);
        out.worst_horizon = T;
      }
    }
  }
  return out;
}

}  // namespace cbvf
