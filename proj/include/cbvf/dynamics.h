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

#ifndef CBVF_DYNAMICS_H_
#define CBVF_DYNAMICS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cbvf {

inline constexpr int kMaxDim = 3;

// Small inline-storage vector used for states, controls and costates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim,
                          1>;

using DynamicsFn = std::function<Vec(const Vec& x, const Vec& u)>;

// Compact admissible control set U: either a finite list or a box.
class ControlSet {
 public:
  static ControlSet Finite(std::vector<Vec> values);
  static ControlSet Box(Vec lower, Vec upper, int sample_count = 9);

  bool is_finite() const { return finite_; }
  int dim() const { return dim_; }
  const std::vector<Vec>& values() const { return values_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  int sample_count() const { return sample_count_; }

  bool Contains(const Vec& u, double tol = 1e-12) const;

  // Box vertices in lexicographic order (lower before upper per axis).
  std::vector<Vec> Corners() const;
  // Tensor grid with `per_dim` points per axis, lexicographic.
  std::vector<Vec> Samples(int per_dim) const;
  // Finite: the list itself. Box: {lower, mid, upper}^m.
  std::vector<Vec> OracleValues() const;

 private:
  ControlSet() = default;

  bool finite_ = true;
  int dim_ = 0;
  std::vector<Vec> values_;
  Vec lower_;
  Vec upper_;
  int sample_count_ = 9;
};

// Control system x' = f(x, u) with x in R^dim, dim <= 3.
class System {
 public:
  System(std::string name, int dim, DynamicsFn f, ControlSet controls,
         std::optional<double> lipschitz_hint = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int control_dim() const { return controls_.dim(); }
  const ControlSet& controls() const { return controls_; }
  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }

  // f(x, u); throws DomainError when u is not in U.
  Vec Eval(const Vec& x, const Vec& u) const;
  // f(x, u) without the membership check, for hot loops over controls that
  // were drawn from U.
  Vec EvalUnchecked(const Vec& x, const Vec& u) const { return f_(x, u); }

  // Same dynamics over a different control set.
  System WithControls(ControlSet controls, std::string name) const;

 private:
  std::string name_;
  int dim_;
  DynamicsFn f_;
  ControlSet controls_;
  std::optional<double> lipschitz_hint_;
};

// scalar_example, counterexample_2d, single_integrator, double_integrator.
System BuiltinSystem(std::string_view name);
std::vector<std::string> BuiltinSystemNames();

// Piecewise-constant control signal u(t) = values[k] on
// [switch_times[k], switch_times[k+1]).
class ControlSignal {
 public:
  ControlSignal(std::vector<double> switch_times, std::vector<Vec> values,
                double horizon);
  static ControlSignal Constant(const Vec& u, double horizon);

  const Vec& At(double t) const;
  double horizon() const { return horizon_; }
  const std::vector<double>& switch_times() const { return switch_times_; }
  const std::vector<Vec>& values() const { return values_; }

 private:
  std::vector<double> switch_times_;
  std::vector<Vec> values_;
  double horizon_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  // controls[i] is the value held on [times[i], times[i+1]); the last entry
  // repeats the final control.
  std::vector<Vec> controls;
};

inline constexpr double kDivergenceNorm = 1e9;
inline constexpr double kDefaultStep = 1e-3;

// One classical RK4 step with u held constant.
Vec Rk4Step(const System& system, const Vec& x, const Vec& u, double dt);

// RK4 rollout of `signal` from x0 over [0, t_end]. Switch times are snapped
// to the step grid; the final step is shortened when t_end is not a multiple
// of `step`. Throws DivergenceError when |x| exceeds kDivergenceNorm.
Trajectory Flow(const System& system, const Vec& x0,
                const ControlSignal& signal, double t_end,
                double step = kDefaultStep);

// Numerical test for f(x, .) being affine on a box control set: three-point
// collinearity along every control axis plus vanishing mixed second
// differences, at each probe state. Always false for finite sets.
bool ProbeControlAffine(const System& system, std::span<const Vec> probe_states,
                        double tol = 1e-9);
std::vector<Vec> DefaultProbeStates(int dim);

// Maximizes linear functionals lam . f(x, u) over U. Finite sets and
// control-affine boxes are handled exactly (the maximum of an affine map
// over a box is attained at a vertex); other boxes fall back to a tensor
// sample grid. Candidates are ordered lexicographically and ties go to the
// first candidate, so Argmax returns the lexicographically smallest
// maximizer.
class ControlMaximizer {
 public:
  explicit ControlMaximizer(const System& system,
                            std::span<const Vec> probe_states = {},
                            std::optional<int> sample_override = std::nullopt);

  const std::vector<Vec>& candidates() const { return candidates_; }
  bool exact() const { return exact_; }
  bool control_affine() const { return affine_; }

  double Max(const System& system, const Vec& x, const Vec& lam) const;
  Vec Argmax(const System& system, const Vec& x, const Vec& lam) const;

 private:
  std::vector<Vec> candidates_;
  bool exact_ = false;
  bool affine_ = false;
};

// Deterministic 64-bit LCG (multiplier 6364136223846793005, increment
// 1442695040888963407). Uniform doubles take the top 53 bits.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t Next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

 private:
  std::uint64_t state_;
};

Vec MakeVec(std::initializer_list<double> values);

}  // namespace cbvf

#endif  // CBVF_DYNAMICS_H_
