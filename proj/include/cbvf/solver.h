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

// Grid solver for the anti-discounted avoid problem
//
//   max{ dv/dT - H_alpha(x, v, grad v), v - g(x) } = 0,   v(., 0) = g,
//   H_alpha(x, r, lam) = max_u lam . f(x, u) + alpha(r),
//
// by explicit level-set marching, plus a brute-force trajectory oracle for
// the implicit definition beta(v(x,T), T) = sup_u min_t beta(g(x(t)), T-t).

#ifndef CBVF_SOLVER_H_
#define CBVF_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/dynamics.h"
#include "cbvf/error.h"
#include "cbvf/grid.h"

namespace cbvf {

enum class Dissipation { kGlobal, kLocal };

struct SolverParams {
  double cfl = 0.5;
  // Increasing, first entry 0.
  std::vector<double> checkpoints = {0.0};
  Dissipation dissipation = Dissipation::kLocal;
  // Overrides the box sample count used when f is not control-affine.
  std::optional<int> control_resolution;
  std::int64_t max_steps = 50'000'000;
  StencilOrder stencil = StencilOrder::kFirst;
};

struct SolveStats {
  std::int64_t steps = 0;
  double dt_max = 0.0;
  bool control_affine = false;
  bool exact_hamiltonian = false;
};

// max_steps ran out; `partial` holds the checkpoints reached so far.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, ValueSeries partial)
      : Error(what), partial_(std::move(partial)) {}
  const ValueSeries& partial() const { return partial_; }

 private:
  ValueSeries partial_;
};

// H_alpha(x, r, lam) = max_u lam . f(x, u) + alpha(r).
double HamAlpha(const System& system, const ClassK& alpha, const Vec& x,
                double r, const Vec& lam);
// H(x, lam) = max_u lam . f(x, u).
double HamMax(const System& system, const Vec& x, const Vec& lam);

// Stateful time marcher behind SolveCbvf/SolveAvoid. Without an alpha it
// solves the plain avoid problem. Each checkpoint interval is split into
// equal steps no longer than the CFL step, so results do not depend on how
// AdvanceTo calls are grouped beyond the targets themselves.
//
// Per step: local (or global) Lax-Friedrichs numerical Hamiltonian
//
//   H(x, v, (D- + D+)/2) + sum_i sigma_i (D+_i - D-_i) / 2,
//
// sigma_i bounding |f_i(x, u)| over the control candidates, two-stage TVD
// Runge-Kutta, and the projection v <- clamp(v, 0, g) after every stage.
class CbvfMarcher {
 public:
  CbvfMarcher(const System& system, std::optional<ClassK> alpha,
              ScalarField g, const SolverParams& params);

  // Marches forward to horizon T >= time(). Throws TruncationError (with an
  // empty partial series) when max_steps would be exceeded and
  // StiffnessError when the step would drop below 1e-9.
  void AdvanceTo(double T);

  const ScalarField& current() const { return v_; }
  const ScalarField& obstacle() const { return g_; }
  double time() const { return time_; }
  const SolveStats& stats() const { return stats_; }

 private:
  void Operator(const std::vector<double>& v, std::vector<double>& out) const;
  void Stage(const std::vector<double>& from, double dt,
             std::vector<double>& to) const;

  System system_;
  std::optional<ClassK> alpha_;
  ScalarField g_;
  ScalarField v_;
  SolverParams params_;
  double time_ = 0.0;
  SolveStats stats_;

  int dim_ = 0;
  int num_candidates_ = 0;
  std::vector<double> velocities_;  // [(node * K + k) * dim + axis]
  std::vector<double> sigma_;       // [node * dim + axis]
  std::vector<unsigned char> faces_;  // bit 2a: at lower face, 2a+1: upper
  mutable std::vector<double> work_a_;
  mutable std::vector<double> work_b_;
};

ValueSeries SolveCbvf(const System& system, const ClassK& alpha,
                      const ScalarField& g, const SolverParams& params,
                      SolveStats* stats = nullptr);
ValueSeries SolveAvoid(const System& system, const ScalarField& g,
                       const SolverParams& params, SolveStats* stats = nullptr);

struct OracleParams {
  int num_intervals = 4;
  // Empty: U itself if finite, else the box corners, edge midpoints and
  // center.
  std::vector<Vec> control_values;
  double time_samples_per_unit = 200.0;
  double bisection_tol = 1e-6;
};

inline constexpr std::int64_t kOracleGuard = 10'000'000;

struct OracleResult {
  double value = 0.0;   // v(x, T)
  double payoff = 0.0;  // sup over enumerated signals of the min-payoff
  std::vector<Vec> best_sequence;
};

using StateFunction = std::function<double(const Vec&)>;

// Enumerates every piecewise-constant signal with num_intervals equal
// segments over control_values, rolls each out with RK4 and takes the best
// min over sample times of beta(g(x(t)), T - t). v is recovered by bisection
// on beta(., T), which is strictly increasing. Throws CapacityError when the
// enumeration exceeds kOracleGuard and DomainError if g is negative along a
// trajectory.
OracleResult CbvfOracle(const System& system, const ClassK& alpha,
                        const StateFunction& g_fn, const Vec& x, double T,
                        const OracleParams& params = {});
// Same enumeration for the avoid value sup_u min_t g(x(t)).
OracleResult AvoidOracle(const System& system, const StateFunction& g_fn,
                         const Vec& x, double T,
                         const OracleParams& params = {});

struct TransformCheckResult {
  double max_violation = 0.0;
  std::int64_t worst_node = -1;
  double worst_horizon = 0.0;
};

// w(x, T) = beta(v(x, T), T) must satisfy w <= beta(g(x), T) at all nodes
// and checkpoints.
TransformCheckResult TransformCheck(const ValueSeries& series,
                                    const ScalarField& g, const ClassK& alpha);

}  // namespace cbvf

#endif  // CBVF_SOLVER_H_
