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

#include "cbvf/dynamics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbvf/error.h"

namespace cbvf {
namespace {

bool LexLess(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

std::vector<Vec> TensorGrid(const Vec& lo, const Vec& hi, int per_dim) {
  const int m = static_cast<int>(lo.size());
  std::vector<Vec> out;
  std::vector<int> idx(m, 0);
  while (true) {
    Vec u(m);
    for (int i = 0; i < m; ++i) {
      if (per_dim == 1 || lo[i] == hi[i]) {
        u[i] = per_dim == 1 ? 0.5 * (lo[i] + hi[i]) : lo[i];
      } else {
        u[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (per_dim - 1);
      }
    }
    out.push_back(u);
    int axis = m - 1;
    while (axis >= 0 && ++idx[axis] == per_dim) idx[axis--] = 0;
    if (axis < 0) break;
  }
  // Degenerate axes produce duplicates; drop them so ties stay meaningful.
  std::sort(out.begin(), out.end(), LexLess);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Vec& a, const Vec& b) { return a == b; }),
            out.end());
  return out;
}

}  // namespace

Vec MakeVec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

ControlSet ControlSet::Finite(std::vector<Vec> values) {
  if (values.empty()) throw DomainError("finite control set must be non-empty");
  const auto m = values.front().size();
  if (m < 1 || m > kMaxDim) throw DomainError("control dimension must be 1..3");
  for (const auto& v : values) {
    if (v.size() != m) throw DomainError("control values differ in dimension");
    if (!v.allFinite()) throw DomainError("control values must be finite");
  }
  std::sort(values.begin(), values.end(), LexLess);
  values.erase(std::unique(values.begin(), values.end(),
                           [](const Vec& a, const Vec& b) { return a == b; }),
               values.end());
  ControlSet s;
  s.finite_ = true;
  s.dim_ = static_cast<int>(m);
  s.values_ = std::move(values);
  return s;
}

ControlSet ControlSet::Box(Vec lower, Vec upper, int sample_count) {
  if (lower.size() != upper.size() || lower.size() < 1 ||
      lower.size() > kMaxDim) {
    throw DomainError("box bounds must share a dimension in 1..3");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
        lower[i] > upper[i]) {
      throw DomainError("box bounds must be finite with lower <= upper");
    }
  }
  if (sample_count < 2) throw DomainError("sample_count must be >= 2");
  ControlSet s;
  s.finite_ = false;
  s.dim_ = static_cast<int>(lower.size());
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  s.sample_count_ = sample_count;
  return s;
}

bool ControlSet::Contains(const Vec& u, double tol) const {
  if (u.size() != dim_) return false;
  if (finite_) {
    return std::any_of(values_.begin(), values_.end(), [&](const Vec& v) {
      return (v - u).cwiseAbs().maxCoeff() <= tol;
    });
  }
  for (int i = 0; i < dim_; ++i) {
    if (u[i] < lower_[i] - tol || u[i] > upper_[i] + tol) return false;
  }
  return true;
}

std::vector<Vec> ControlSet::Corners() const {
  if (finite_) return values_;
  return TensorGrid(lower_, upper_, 2);
}

std::vector<Vec> ControlSet::Samples(int per_dim) const {
  if (finite_) return values_;
  return TensorGrid(lower_, upper_, std::max(per_dim, 2));
}

std::vector<Vec> ControlSet::OracleValues() const {
  if (finite_) return values_;
  return TensorGrid(lower_, upper_, 3);
}

System::System(std::string name, int dim, DynamicsFn f, ControlSet controls,
               std::optional<double> lipschitz_hint)
    : name_(std::move(name)),
      dim_(dim),
      f_(std::move(f)),
      controls_(std::move(controls)),
      lipschitz_hint_(lipschitz_hint) {
  if (dim_ < 1 || dim_ > kMaxDim) {
    throw DomainError("system dimension must be 1..3");
  }
  if (!f_) throw DomainError("system dynamics must be callable");
}

Vec System::Eval(const Vec& x, const Vec& u) const {
  if (x.size() != dim_) throw DomainError("state dimension mismatch");
  if (!controls_.Contains(u)) {
    throw DomainError("control outside the admissible set of " + name_);
  }
  return f_(x, u);
}

System System::WithControls(ControlSet controls, std::string name) const {
  return System(std::move(name), dim_, f_, std::move(controls),
                lipschitz_hint_);
}

std::vector<std::string> BuiltinSystemNames() {
  return {"scalar_example", "counterexample_2d", "single_integrator",
          "double_integrator"};
}

System BuiltinSystem(std::string_view name) {
  const Vec lo1 = MakeVec({-1.0});
  const Vec hi1 = MakeVec({1.0});
  if (name == "scalar_example") {
    return System(
        "scalar_example", 1,
        [](const Vec& x, const Vec& u) {
          const double s = x[0];
          Vec dx(1);
          dx[0] = s + (s + s * s * s) / (1.0 + std::abs(s)) * u[0];
          return dx;
        },
        ControlSet::Box(lo1, hi1));
  }
  if (name == "counterexample_2d") {
    return System(
        "counterexample_2d", 2,
        [](const Vec& x, const Vec& u) {
          const double r = std::hypot(x[0], x[1]);
          Vec dx(2);
          if (r <= 1.0) {
            dx[0] = 0.0;
            dx[1] = u[0];
          } else {
            const double pull = (1.0 - r) / r;
            dx[0] = x[0] * pull;
            dx[1] = x[1] * pull + u[0];
          }
          return dx;
        },
        ControlSet::Finite({MakeVec({-1.0}), MakeVec({1.0})}));
  }
  if (name == "single_integrator") {
    return System(
        "single_integrator", 1, [](const Vec&, const Vec& u) { return u; },
        ControlSet::Box(lo1, hi1));
  }
  if (name == "double_integrator") {
    return System(
        "double_integrator", 2,
        [](const Vec& x, const Vec& u) {
          Vec dx(2);
          dx[0] = x[1];
          dx[1] = u[0];
          return dx;
        },
        ControlSet::Box(lo1, hi1));
  }
  throw LookupError("unknown builtin system '" + std::string(name) + "'");
}

ControlSignal::ControlSignal(std::vector<double> switch_times,
                             std::vector<Vec> values, double horizon)
    : switch_times_(std::move(switch_times)),
      values_(std::move(values)),
      horizon_(horizon) {
  if (switch_times_.empty() || switch_times_.size() != values_.size()) {
    throw DomainError("control signal needs one value per switch time");
  }
  if (switch_times_.front() != 0.0) {
    throw DomainError("control signal must start at t = 0");
  }
  for (std::size_t i = 1; i < switch_times_.size(); ++i) {
    if (!(switch_times_[i] > switch_times_[i - 1])) {
      throw DomainError("switch times must be strictly increasing");
    }
  }
  if (!(horizon_ >= 0.0)) throw DomainError("signal horizon must be >= 0");
}

ControlSignal ControlSignal::Constant(const Vec& u, double horizon) {
  return ControlSignal({0.0}, {u}, horizon);
}

const Vec& ControlSignal::At(double t) const {
  auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
  const auto k = static_cast<std::size_t>(it - switch_times_.begin());
  return values_[k == 0 ? 0 : k - 1];
}

Vec Rk4Step(const System& system, const Vec& x, const Vec& u, double dt) {
  const Vec k1 = system.EvalUnchecked(x, u);
  const Vec k2 = system.EvalUnchecked(x + 0.5 * dt * k1, u);
  const Vec k3 = system.EvalUnchecked(x + 0.5 * dt * k2, u);
  const Vec k4 = system.EvalUnchecked(x + dt * k3, u);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory Flow(const System& system, const Vec& x0,
                const ControlSignal& signal, double t_end, double step) {
  if (!(step > 0.0)) throw DomainError("integration step must be positive");
  if (!(t_end >= 0.0) || t_end > signal.horizon() * (1.0 + 1e-12) + 1e-12) {
    throw DomainError("t_end must lie in [0, signal horizon]");
  }
  if (x0.size() != system.dim()) throw DomainError("initial state dimension");
  for (const auto& u : signal.values()) {
    if (!system.controls().Contains(u)) {
      throw DomainError("control signal leaves the admissible set");
    }
  }

  const auto steps =
      static_cast<long long>(std::ceil(t_end / step - 1e-9));
  std::vector<long long> snapped;
  snapped.reserve(signal.switch_times().size());
  for (double s : signal.switch_times()) snapped.push_back(std::llround(s / step));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.controls.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  std::size_t segment = 0;
  Vec x = x0;
  for (long long k = 0; k < steps; ++k) {
    while (segment + 1 < snapped.size() && snapped[segment + 1] <= k) ++segment;
    const Vec& u = signal.values()[segment];
    const double t0 = static_cast<double>(k) * step;
    const double t1 = k + 1 == steps ? t_end : static_cast<double>(k + 1) * step;
    x = Rk4Step(system, x, u, t1 - t0);
    if (!x.allFinite() || x.norm() > kDivergenceNorm) {
      throw DivergenceError("trajectory diverged at t = " + std::to_string(t1));
    }
    traj.controls.push_back(u);
    traj.times.push_back(t1);
    traj.states.push_back(x);
  }
  traj.controls.push_back(traj.controls.empty() ? signal.values().front()
                                                : traj.controls.back());
  return traj;
}

std::vector<Vec> DefaultProbeStates(int dim) {
  static constexpr double kLevels[] = {-1.7, -0.6, 0.3, 1.1};
  std::vector<Vec> out;
  const int n = 4;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= n;
  for (int k = 0; k < total; ++k) {
    Vec x(dim);
    int rest = k;
    for (int i = dim - 1; i >= 0; --i) {
      x[i] = kLevels[rest % n];
      rest /= n;
    }
    out.push_back(x);
  }
  return out;
}

bool ProbeControlAffine(const System& system, std::span<const Vec> probe_states,
                        double tol) {
  const ControlSet& U = system.controls();
  if (U.is_finite()) return false;
  const int m = U.dim();
  const Vec center = 0.5 * (U.lower() + U.upper());
  const Vec half = 0.5 * (U.upper() - U.lower());
  auto close = [tol](const Vec& a, const Vec& b) {
    const double scale = 1.0 + std::max(a.cwiseAbs().maxCoeff(),
                                        b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
  };
  for (const Vec& x : probe_states) {
    const Vec f0 = system.EvalUnchecked(x, center);
    if (!f0.allFinite()) return false;
    std::vector<Vec> f_plus(m);
    for (int i = 0; i < m; ++i) {
      if (half[i] == 0.0) {
        f_plus[i] = f0;
        continue;
      }
      Vec up = center;
      Vec dn = center;
      up[i] += half[i];
      dn[i] -= half[i];
      f_plus[i] = system.EvalUnchecked(x, up);
      const Vec f_minus = system.EvalUnchecked(x, dn);
      if (!close(0.5 * (f_plus[i] + f_minus), f0)) return false;
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        Vec both = center;
        both[i] += half[i];
        both[j] += half[j];
        const Vec fij = system.EvalUnchecked(x, both);
        if (!close(fij + f0, f_plus[i] + f_plus[j])) return false;
      }
    }
  }
  return true;
}

ControlMaximizer::ControlMaximizer(const System& system,
                                   std::span<const Vec> probe_states,
                                   std::optional<int> sample_override) {
  const ControlSet& U = system.controls();
  if (U.is_finite()) {
    candidates_ = U.values();
    exact_ = true;
    return;
  }
  std::vector<Vec> defaults;
  if (probe_states.empty()) {
    defaults = DefaultProbeStates(system.dim());
    probe_states = defaults;
  }
  affine_ = ProbeControlAffine(system, probe_states);
  if (affine_) {
    candidates_ = U.Corners();
    exact_ = true;
  } else {
    candidates_ = U.Samples(sample_override.value_or(U.sample_count()));
  }
}

double ControlMaximizer::Max(const System& system, const Vec& x,
                             const Vec& lam) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& u : candidates_) {
    best = std::max(best, lam.dot(system.EvalUnchecked(x, u)));
  }
  return best;
}

Vec ControlMaximizer::Argmax(const System& system, const Vec& x,
                             const Vec& lam) const {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    const double value = lam.dot(system.EvalUnchecked(x, candidates_[k]));
    if (value > best) {
      best = value;
      arg = k;
    }
  }
  return candidates_[arg];
}

}  // namespace cbvf
