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

// Numerical barrier-function checks. "Viscosity CBF" is decided through
// CB-VF time invariance: h is one iff v(., T) = max{0, h} for all T.

#ifndef CBVF_VERIFY_H_
#define CBVF_VERIFY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/controller.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/solver.h"
#include "json.hpp"

namespace cbvf {

enum class Verdict { kPass, kFail, kInconclusive };

const char* VerdictName(Verdict verdict);

struct Witness {
  Vec x;
  double t_or_T = 0.0;
  double measured = 0.0;
  double required = 0.0;
};

// Witnesses are capped at kMaxWitnesses, worst first.
inline constexpr std::size_t kMaxWitnesses = 16;

struct Report {
  Verdict verdict = Verdict::kPass;
  double max_violation = 0.0;
  std::vector<Witness> witnesses;
  nlohmann::json tolerances = nlohmann::json::object();
  std::vector<std::string> notes;
  std::int64_t checked = 0;
  // Check-specific extras (per-alpha sub-verdicts, Cauchy history, ...).
  nlohmann::json details = nlohmann::json::object();

  bool passed() const { return verdict == Verdict::kPass; }
  nlohmann::json ToJson() const;
  std::string Summary() const;
};

// Pointwise max{0, .}.
ScalarField ClampNonneg(const ScalarField& field);

// Differentiable candidate barrier. Without `gradient`, central differences
// with step 1e-6 are used.
struct BarrierFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;

  Vec Gradient(const Vec& x) const;
};

// max_u grad h(x) . f(x, u) >= -alpha(h(x)) - tol at every sample with
// h(x) > 0; other samples are skipped.
Report CheckClassicalCbf(const System& system, const ClassK& alpha,
                         const BarrierFunction& h,
                         const std::vector<Vec>& samples, double tol = 1e-9);

inline constexpr int kDefaultMarginBand = 3;

// 2 * max spacing * largest one-sided difference quotient of g.
double DefaultInvarianceTolerance(const ScalarField& g);

// max over checkpoints T > 0 and nodes at least `margin_band` cells inside
// the grid of g(x) - v(x, T); pass iff <= tol. Inconclusive when more than
// 20% of the nodes fall in the band.
Report CheckTimeInvariance(const ValueSeries& series, const ScalarField& g,
                           double tol, int margin_band = kDefaultMarginBand);

enum class ControllerKind { kGreedy, kSampleHold };

struct BarrierParams {
  double theta = 0.9;
  double horizon = 5.0;
  std::vector<Vec> initial_states;
  ControllerKind controller = ControllerKind::kGreedy;
  double tau = 0.01;  // hold period for kSampleHold
  double tol = 1e-3;
  double step = kDefaultStep;
  GradientMode gradient_mode = GradientMode::kCentral;
};

// Rolls out the synthesized controller from each initial state and checks
// h(x(t)) >= beta(theta h(x0), t) - tol at every integration sample, with h
// interpolated from h_field. Greedy control is sample-and-hold with the hold
// period equal to the integration step. Divergence or leaving the grid makes
// the verdict inconclusive. Rollouts are returned through `rollouts` when
// given.
Report CheckBarrierGuarantee(const System& system, const ClassK& alpha,
                             const ScalarField& h_field,
                             const BarrierParams& params,
                             std::vector<Trajectory>* rollouts = nullptr);

// Re-evaluates the guarantee on stored rollouts for another theta.
Report EvaluateBarrierRollouts(const std::vector<Trajectory>& rollouts,
                               const ClassK& alpha, const ScalarField& h_field,
                               double theta, double tol);

struct InvarianceOptions {
  std::optional<double> tol;  // default: DefaultInvarianceTolerance(h+)
  int margin_band = kDefaultMarginBand;
};

// Solves the CB-VF with g = max{0, h} and checks time invariance.
Report VerifyViscosityCbf(const System& system, const ClassK& alpha,
                          const ScalarField& h_field,
                          const SolverParams& solver_params,
                          const InvarianceOptions& options = {},
                          ValueSeries* series_out = nullptr);

// Avoid-value time invariance for g = max{0, h}, conjoined with
// VerifyViscosityCbf for each alpha. A finite alpha list only gives a
// necessary condition for the all-alpha statement.
Report CheckAvoidTimeInvariance(const System& system,
                                const ScalarField& h_field,
                                const std::vector<ClassK>& alphas,
                                const SolverParams& solver_params,
                                const InvarianceOptions& options = {});

}  // namespace cbvf

#endif  // CBVF_VERIFY_H_
