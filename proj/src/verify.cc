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

#include "cbvf/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cbvf/error.h"

namespace cbvf {
namespace {

constexpr double kFdStep = 1e-6;
constexpr double kBandFractionLimit = 0.2;

// Keeps the worst witnesses; ties resolved by insertion order.
class WitnessSet {
 public:
  void Add(double violation, Witness w) {
    items_.push_back({violation, order_++, std::move(w)});
  }
  std::vector<Witness> Take() {
    std::sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) {
      if (a.violation != b.violation) return a.violation > b.violation;
      return a.order < b.order;
    });
    std::vector<Witness> out;
    for (std::size_t i = 0; i < items_.size() && i < kMaxWitnesses; ++i) {
      out.push_back(items_[i].witness);
    }
    return out;
  }
  bool empty() const { return items_.empty(); }

 private:
  struct Item {
    double violation;
    std::size_t order;
    Witness witness;
  };
  std::vector<Item> items_;
  std::size_t order_ = 0;
};

nlohmann::json VecJson(const Vec& x) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < x.size(); ++i) out.push_back(x[i]);
  return out;
}

Verdict Combine(Verdict a, Verdict b) {
  if (a == Verdict::kFail || b == Verdict::kFail) return Verdict::kFail;
  if (a == Verdict::kInconclusive || b == Verdict::kInconclusive) {
    return Verdict::kInconclusive;
  }
  return Verdict::kPass;
}

}  // namespace

const char* VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

nlohmann::json Report::ToJson() const {
  nlohmann::json j;
  j["verdict"] = VerdictName(verdict);
  j["max_violation"] = max_violation;
  j["tolerances"] = tolerances;
  j["checked"] = checked;
  auto& w = j["witnesses"] = nlohmann::json::array();
  for (const auto& item : witnesses) {
    w.push_back({{"x", VecJson(item.x)},
                 {"t_or_T", item.t_or_T},
                 {"measured", item.measured},
                 {"required", item.required}});
  }
  j["notes"] = notes;
  if (!details.empty()) j["details"] = details;
  return j;
}

std::string Report::Summary() const {
  std::ostringstream os;
  os << "verdict: " << VerdictName(verdict) << "\n";
  os << "max violation: " << max_violation << "\n";
  os << "checked: " << checked << "\n";
  os << "tolerances: " << tolerances.dump() << "\n";
  for (const auto& note : notes) os << "note: " << note << "\n";
  for (const auto& item : witnesses) {
    os << "witness: x=(";
    for (int i = 0; i < item.x.size(); ++i) {
      os << (i ? ", " : "") << item.x[i];
    }
    os << ") t=" << item.t_or_T << " measured=" << item.measured
       << " required=" << item.required << "\n";
  }
  return os.str();
}

ScalarField ClampNonneg(const ScalarField& field) {
  ScalarField out = field;
  for (double& v : out.values) v = std::max(0.0, v);
  return out;
}

Vec BarrierFunction::Gradient(const Vec& x) const {
  if (gradient) return gradient(x);
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec a = x;
    Vec b = x;
    a[i] += kFdStep;
    b[i] -= kFdStep;
    g[i] = (value(a) - value(b)) / (2.0 * kFdStep);
  }
  return g;
}

Report CheckClassicalCbf(const System& system, const ClassK& alpha,
                         const BarrierFunction& h,
                         const std::vector<Vec>& samples, double tol) {
  Report report;
  report.tolerances["margin"] = tol;
  const ControlMaximizer maximizer(system);
  if (!maximizer.exact()) {
    report.notes.push_back("control maximization is sampled, not exact");
  }
  WitnessSet witnesses;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : samples) {
    if (!x.allFinite()) throw DomainError("classical check sample not finite");
    const double hx = h.value(x);
    if (!(hx > 0.0)) continue;
    ++report.checked;
    const double lie = maximizer.Max(system, x, h.Gradient(x));
    const double floor = -alpha(hx);
    const double margin = lie - floor;
    min_margin = std::min(min_margin, margin);
    if (margin < -tol) witnesses.Add(-margin, {x, 0.0, lie, floor});
  }
  report.max_violation =
      report.checked ? std::max(0.0, -min_margin) : 0.0;
  report.verdict = witnesses.empty() ? Verdict::kPass : Verdict::kFail;
  report.witnesses = witnesses.Take();
  if (report.checked == 0) {
    report.notes.push_back("no sample has h(x) > 0; pass is vacuous");
  }
  return report;
}

double DefaultInvarianceTolerance(const ScalarField& g) {
  return 2.0 * g.grid.max_spacing() * EstimateLipschitz(g);
}

Report CheckTimeInvariance(const ValueSeries& series, const ScalarField& g,
                           double tol, int margin_band) {
  if (series.fields.size() != series.checkpoints.size()) {
    throw ShapeError("series checkpoints and fields disagree");
  }
  Report report;
  report.tolerances["invariance"] = tol;
  report.tolerances["margin_band"] = margin_band;
  const Grid& grid = g.grid;
  std::int64_t banded = 0;
  for (std::int64_t n = 0; n < grid.size(); ++n) {
    if (grid.CellsFromBoundary(n) < margin_band) ++banded;
  }
  WitnessSet witnesses;
  for (std::size_t k = 0; k < series.fields.size(); ++k) {
    const ScalarField& v = series.fields[k];
    if (!(v.grid == grid)) throw ShapeError("series and g grids differ");
    const double T = series.checkpoints[k];
    if (!(T > 0.0)) continue;
    for (std::int64_t n = 0; n < grid.size(); ++n) {
      if (grid.CellsFromBoundary(n) < margin_band) continue;
      ++report.checked;
      const double gap = g.values[n] - v.values[n];
      report.max_violation = std::max(report.max_violation, gap);
      if (gap > tol) {
        witnesses.Add(gap, {grid.Point(n), T, v.values[n], g.values[n] - tol});
      }
    }
  }
  report.witnesses = witnesses.Take();
  const double fraction =
      static_cast<double>(banded) / static_cast<double>(grid.size());
  if (fraction > kBandFractionLimit) {
    report.verdict = Verdict::kInconclusive;
    report.notes.push_back("boundary band covers more than 20% of the nodes");
  } else {
    report.verdict = witnesses.empty() ? Verdict::kPass : Verdict::kFail;
  }
  return report;
}

Report EvaluateBarrierRollouts(const std::vector<Trajectory>& rollouts,
                               const ClassK& alpha, const ScalarField& h_field,
                               double theta, double tol) {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw DomainError("theta must lie in [0, 1)");
  }
  Report report;
  report.tolerances["barrier"] = tol;
  report.tolerances["theta"] = theta;
  WitnessSet witnesses;
  WitnessSet lost;
  for (const Trajectory& traj : rollouts) {
    const double h0 = Interpolate(h_field, traj.states.front());
    const double level = theta * std::max(0.0, h0);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      double measured;
      try {
        measured = Interpolate(h_field, traj.states[i]);
      } catch (const OutOfBoundsError&) {
        lost.Add(0.0, {traj.states[i], traj.times[i],
                       std::numeric_limits<double>::quiet_NaN(), 0.0});
        break;
      }
      ++report.checked;
      const double required = alpha.Beta(level, traj.times[i]);
      const double violation = required - measured;
      report.max_violation = std::max(report.max_violation, violation);
      if (violation > tol) {
        witnesses.Add(violation,
                      {traj.states[i], traj.times[i], measured, required - tol});
      }
    }
  }
  if (!witnesses.empty()) {
    report.verdict = Verdict::kFail;
    report.witnesses = witnesses.Take();
  } else if (!lost.empty()) {
    report.verdict = Verdict::kInconclusive;
    report.witnesses = lost.Take();
    report.notes.push_back("a rollout left the grid");
  }
  return report;
}

Report CheckBarrierGuarantee(const System& system, const ClassK& alpha,
                             const ScalarField& h_field,
                             const BarrierParams& params,
                             std::vector<Trajectory>* rollouts) {
  if (!(params.horizon > 0.0)) throw DomainError("horizon must be positive");
  if (params.initial_states.empty()) {
    throw DomainError("barrier check needs at least one initial state");
  }
  const GreedyController greedy(system, h_field, params.gradient_mode);
  const double tau =
      params.controller == ControllerKind::kGreedy ? params.step : params.tau;
  const SampleHoldController controller(greedy, tau, params.theta, params.step);

  std::vector<Trajectory> done;
  WitnessSet failed;
  for (const Vec& x0 : params.initial_states) {
    if (!(Interpolate(h_field, x0) > 0.0)) {
      throw DomainError("barrier check needs h(x0) > 0 at every initial state");
    }
    try {
      done.push_back(controller.Run(alpha, x0, params.horizon).trajectory);
    } catch (const DivergenceError&) {
      failed.Add(0.0, {x0, params.horizon,
                       std::numeric_limits<double>::quiet_NaN(), 0.0});
    } catch (const OutOfBoundsError&) {
      failed.Add(0.0, {x0, params.horizon,
                       std::numeric_limits<double>::quiet_NaN(), 0.0});
    }
  }
  Report report =
      EvaluateBarrierRollouts(done, alpha, h_field, params.theta, params.tol);
  report.tolerances["horizon"] = params.horizon;
  report.tolerances["tau"] = tau;
  if (!failed.empty() && report.verdict == Verdict::kPass) {
    report.verdict = Verdict::kInconclusive;
    report.witnesses = failed.Take();
    report.notes.push_back("a rollout diverged or left the grid");
  }
  if (rollouts) *rollouts = std::move(done);
  return report;
}

Report VerifyViscosityCbf(const System& system, const ClassK& alpha,
                          const ScalarField& h_field,
                          const SolverParams& solver_params,
                          const InvarianceOptions& options,
                          ValueSeries* series_out) {
  const ScalarField g = ClampNonneg(h_field);
  std::int64_t clamped = 0;
  for (std::size_t n = 0; n < g.values.size(); ++n) {
    if (g.values[n] != h_field.values[n]) ++clamped;
  }
  const double tol = options.tol.value_or(DefaultInvarianceTolerance(g));
  ValueSeries series = SolveCbvf(system, alpha, g, solver_params);
  Report report = CheckTimeInvariance(series, g, tol, options.margin_band);
  if (clamped > 0) {
    report.notes.push_back("checked max{0, h}; clamped " +
                           std::to_string(clamped) + " negative nodes");
  }
  report.tolerances["horizon"] = solver_params.checkpoints.back();
  if (series_out) *series_out = std::move(series);
  return report;
}

Report CheckAvoidTimeInvariance(const System& system,
                                const ScalarField& h_field,
                                const std::vector<ClassK>& alphas,
                                const SolverParams& solver_params,
                                const InvarianceOptions& options) {
  const ScalarField g = ClampNonneg(h_field);
  const double tol = options.tol.value_or(DefaultInvarianceTolerance(g));
  const ValueSeries avoid = SolveAvoid(system, g, solver_params);
  Report report = CheckTimeInvariance(avoid, g, tol, options.margin_band);
  report.details["avoid"] = {{"verdict", VerdictName(report.verdict)},
                             {"max_violation", report.max_violation}};
  auto& per_alpha = report.details["alphas"] = nlohmann::json::array();
  for (const ClassK& alpha : alphas) {
    InvarianceOptions sub = options;
    sub.tol = tol;
    const Report r = VerifyViscosityCbf(system, alpha, h_field, solver_params, sub);
    per_alpha.push_back({{"alpha", alpha.ToJson()},
                         {"verdict", VerdictName(r.verdict)},
                         {"max_violation", r.max_violation}});
    report.verdict = Combine(report.verdict, r.verdict);
    report.max_violation = std::max(report.max_violation, r.max_violation);
    for (const auto& w : r.witnesses) {
      if (report.witnesses.size() >= kMaxWitnesses) break;
      report.witnesses.push_back(w);
    }
  }
  if (!alphas.empty()) {
    report.notes.push_back(
        "necessary-condition check: finite alpha list stands in for all alpha");
  }
  return report;
}

}  // namespace cbvf
