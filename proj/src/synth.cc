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

#include "cbvf/synth.h"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cbvf/error.h"

namespace cbvf {

ScalarField PointwiseMax(const ScalarField& h1, const ScalarField& h2) {
  if (!(h1.grid == h2.grid)) throw ShapeError("pointwise max needs equal grids");
  std::vector<double> values(h1.values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    values[n] = std::max(h1.values[n], h2.values[n]);
  }
  return ScalarField(h1.grid, std::move(values),
                     "max(" + h1.label + "," + h2.label + ")");
}

double FixedPointResidual(const System& system, const ClassK& alpha,
                          const ScalarField& h, const SolverParams& base,
                          double horizon) {
  SolverParams params = base;
  params.checkpoints = {0.0, horizon};
  const ValueSeries series = SolveCbvf(system, alpha, h, params);
  return SupNormDiff(series.fields.back(), h);
}

LimitResult LimitCbvf(const System& system, const ClassK& alpha,
                      const ScalarField& g, const SolverParams& solver_params,
                      const LimitParams& limit,
                      const SolverParams& verify_params) {
  if (limit.window < 2) throw DomainError("convergence window must be >= 2");
  if (!(limit.spacing > 0.0) || !(limit.max_T > 0.0)) {
    throw DomainError("checkpoint spacing and max_T must be positive");
  }
  LimitResult result{g, false, 0.0, 0.0, 0.0, {}, {}, std::nullopt};
  result.tol = limit.tol.value_or(DefaultInvarianceTolerance(g));

  CbvfMarcher marcher(system, alpha, g, solver_params);
  std::deque<ScalarField> trailing{g};
  const auto last =
      static_cast<int>(std::floor(limit.max_T / limit.spacing + 1e-9));
  for (int k = 1; k <= last; ++k) {
    const double T = k * limit.spacing;
    marcher.AdvanceTo(T);
    result.history.push_back({T, SupNormDiff(marcher.current(), trailing.back())});
    trailing.push_back(marcher.current());
    if (static_cast<int>(trailing.size()) > limit.window) trailing.pop_front();
    result.T_final = T;
    if (static_cast<int>(trailing.size()) == limit.window &&
        SupNormDiff(trailing.back(), trailing.front()) <= result.tol) {
      result.converged = true;
      result.T_converge = (k - limit.window + 1) * limit.spacing;
      break;
    }
  }
  result.h_inf = trailing.back();
  result.h_inf.label = g.label.empty() ? "h_inf" : g.label + "_inf";

  if (!result.converged) {
    Report& r = result.verification;
    r.verdict = Verdict::kInconclusive;
    r.tolerances["convergence"] = result.tol;
    r.notes.push_back("no convergence before max_T");
    r.max_violation = result.history.empty() ? 0.0 : result.history.back().sup_change;
    auto& hist = r.details["history"] = nlohmann::json::array();
    for (const auto& p : result.history) hist.push_back({p.T, p.sup_change});
    return result;
  }
  InvarianceOptions options;
  options.tol = result.tol;
  result.verification =
      VerifyViscosityCbf(system, alpha, result.h_inf, verify_params, options);
  result.fixed_point_residual =
      FixedPointResidual(system, alpha, result.h_inf, solver_params,
                         (limit.window - 1) * limit.spacing);
  result.verification.details["T_converge"] = result.T_converge;
  result.verification.details["fixed_point_residual"] =
      *result.fixed_point_residual;
  return result;
}

Report SequenceLimitCheck(const std::vector<ScalarField>& fields,
                          const System& system, const ClassK& alpha,
                          const SolverParams& solver_params, double tol,
                          const InvarianceOptions& options) {
  if (fields.size() < 2) throw DomainError("sequence check needs >= 2 fields");
  std::vector<double> changes;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    changes.push_back(SupNormDiff(fields[i], fields[i - 1]));
  }
  bool cauchy = changes.back() <= tol;
  for (std::size_t i = changes.size() / 2 + 1; i < changes.size(); ++i) {
    if (changes[i] > changes[i - 1]) cauchy = false;
  }

  Report report;
  if (cauchy) {
    report = VerifyViscosityCbf(system, alpha, fields.back(), solver_params,
                                options);
  } else {
    const ScalarField& a = fields.back();
    const ScalarField& b = fields[fields.size() - 2];
    std::int64_t worst = 0;
    for (std::size_t n = 0; n < a.values.size(); ++n) {
      if (std::abs(a.values[n] - b.values[n]) >
          std::abs(a.values[worst] - b.values[worst])) {
        worst = static_cast<std::int64_t>(n);
      }
    }
    report.verdict = Verdict::kFail;
    report.max_violation = changes.back();
    report.witnesses.push_back({a.grid.Point(worst),
                                static_cast<double>(fields.size() - 1),
                                changes.back(), tol});
    report.notes.push_back("sequence is not Cauchy in sup-norm");
  }
  report.tolerances["cauchy"] = tol;
  report.details["sup_changes"] = changes;
  return report;
}

}  // namespace cbvf
