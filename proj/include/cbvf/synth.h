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

#ifndef CBVF_SYNTH_H_
#define CBVF_SYNTH_H_

#include <optional>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/solver.h"
#include "cbvf/verify.h"

namespace cbvf {

// Node-wise max{h1, h2}; the label is "max(l1,l2)".
ScalarField PointwiseMax(const ScalarField& h1, const ScalarField& h2);

struct LimitParams {
  int window = 5;
  double spacing = 0.25;
  std::optional<double> tol;  // default: DefaultInvarianceTolerance(g)
  double max_T = 10.0;
};

struct ConvergencePoint {
  double T = 0.0;
  double sup_change = 0.0;  // |v(., T_k) - v(., T_{k-1})|_inf
};

struct LimitResult {
  ScalarField h_inf;
  bool converged = false;
  double T_converge = 0.0;  // first checkpoint of the settled window
  double T_final = 0.0;
  double tol = 0.0;
  std::vector<ConvergencePoint> history;
  Report verification;
  std::optional<double> fixed_point_residual;
};

// Marches the CB-VF from g with checkpoints every `spacing` and stops once
// the sup-norm change across the trailing `window` checkpoints is <= tol.
// On success returns the last field, its VerifyViscosityCbf report (with
// `verify_params`) and the fixed-point residual. On reaching max_T the
// verification verdict is inconclusive and carries the decay history.
LimitResult LimitCbvf(const System& system, const ClassK& alpha,
                      const ScalarField& g, const SolverParams& solver_params,
                      const LimitParams& limit,
                      const SolverParams& verify_params);

// Sup-norm change of h under one more solve of length `horizon` with g = h.
double FixedPointResidual(const System& system, const ClassK& alpha,
                          const ScalarField& h, const SolverParams& base,
                          double horizon);

// Cauchy surrogate on the grid (last successive sup-norm change <= tol and
// non-increasing changes over the second half of the sequence), then
// VerifyViscosityCbf on the last field. Both must hold.
Report SequenceLimitCheck(const std::vector<ScalarField>& fields,
                          const System& system, const ClassK& alpha,
                          const SolverParams& solver_params, double tol,
                          const InvarianceOptions& options = {});

}  // namespace cbvf

#endif  // CBVF_SYNTH_H_
