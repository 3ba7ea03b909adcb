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

#include "cbvf/controller.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbvf/error.h"

namespace cbvf {

GreedyController::GreedyController(const System& system, ScalarField h,
                                   GradientMode mode,
                                   std::optional<int> sample_override)
    : system_(system), h_(std::move(h)), mode_(mode) {
  if (h_.grid.dim() != system_.dim()) {
    throw ShapeError("barrier field dimension does not match the system");
  }
  std::vector<Vec> probes = DefaultProbeStates(system_.dim());
  probes.push_back(h_.grid.lo());
  probes.push_back(h_.grid.hi());
  candidates_ = ControlMaximizer(system_, probes, sample_override).candidates();

  const UpwindGradients grads = ComputeUpwindGradients(h_);
  const int d = h_.grid.dim();
  const auto N = static_cast<std::size_t>(h_.grid.size());
  for (int a = 0; a < d; ++a) {
    std::vector<double> c(N), l(N), r(N);
    for (std::size_t n = 0; n < N; ++n) {
      l[n] = grads.left[n * d + a];
      r[n] = grads.right[n * d + a];
      c[n] = 0.5 * (l[n] + r[n]);
    }
    central_.emplace_back(h_.grid, std::move(c));
    left_.emplace_back(h_.grid, std::move(l));
    right_.emplace_back(h_.grid, std::move(r));
  }
}

Vec GreedyController::Gradient(const Vec& x) const {
  Vec g(system_.dim());
  for (int a = 0; a < system_.dim(); ++a) g[a] = Interpolate(central_[a], x);
  return g;
}

Vec GreedyController::Control(const Vec& x) const {
  const int d = system_.dim();
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  if (mode_ == GradientMode::kCentral) {
    const Vec lam = Gradient(x);
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
      const double score = lam.dot(system_.EvalUnchecked(x, candidates_[k]));
      if (score > best) {
        best = score;
        arg = k;
      }
    }
  } else {
    Vec lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      lo[a] = Interpolate(left_[a], x);
      hi[a] = Interpolate(right_[a], x);
    }
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
      const Vec f = system_.EvalUnchecked(x, candidates_[k]);
      double score = 0.0;
      for (int a = 0; a < d; ++a) score += f[a] * (f[a] >= 0.0 ? hi[a] : lo[a]);
      if (score > best) {
        best = score;
        arg = k;
      }
    }
  }
  return candidates_[arg];
}

SampleHoldController::SampleHoldController(GreedyController base, double tau,
                                           double theta0, double step)
    : base_(std::move(base)), tau_(tau), theta0_(theta0), step_(step) {
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) {
    throw DomainError("hold period tau must be positive");
  }
  if (!(theta0_ >= 0.0 && theta0_ < 1.0)) {
    throw DomainError("theta_0 must lie in [0, 1)");
  }
  if (!(step_ > 0.0)) throw DomainError("integration step must be positive");
}

double SampleHoldController::Theta(int n) const {
  return 1.0 - (1.0 - theta0_) / (n + 1.0);
}

Rollout SampleHoldController::Run(const ClassK& alpha, const Vec& x0,
                                  double horizon) const {
  if (!(horizon >= 0.0)) throw DomainError("horizon must be >= 0");
  const System& system = base_.system();
  const double h0 = base_.Value(x0);
  if (!(h0 > 0.0)) {
    throw DomainError("sample-and-hold rollout needs h(x0) > 0");
  }
  Rollout out;
  Trajectory& traj = out.trajectory;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (horizon == 0.0) {
    traj.controls.push_back(base_.Control(x0));
    return out;
  }

  const auto periods =
      static_cast<int>(std::max(1.0, std::ceil(horizon / tau_ - 1e-9)));
  Vec x = x0;
  for (int n = 0; n < periods; ++n) {
    const double t_n = n * tau_;
    const double length = std::min(tau_, horizon - t_n);
    if (!(length > 0.0)) break;
    const Vec u = base_.Control(x);
    const double base_level = Theta(n) * base_.Value(x);
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(length / step_ - 1e-9)));
    const double h = length / substeps;
    double theta_hat = std::numeric_limits<double>::infinity();
    for (int s = 1; s <= substeps; ++s) {
      x = Rk4Step(system, x, u, h);
      if (!x.allFinite() || x.norm() > kDivergenceNorm) {
        throw DivergenceError("sample-and-hold rollout diverged");
      }
      traj.controls.push_back(u);
      traj.times.push_back(s == substeps ? t_n + length : t_n + s * h);
      traj.states.push_back(x);
      const double value = base_.Value(x);
      const double floor = alpha.Beta(std::max(0.0, base_level), s * h);
      double ratio;
      if (floor > 0.0) {
        ratio = value / floor;
      } else {
        ratio = value >= 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
      }
      theta_hat = std::min(theta_hat, ratio);
    }
    out.theta_log.push_back({n, t_n, theta_hat});
  }
  traj.controls.push_back(traj.controls.back());
  return out;
}

}  // namespace cbvf
