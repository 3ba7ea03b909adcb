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

#ifndef CBVF_CONTROLLER_H_
#define CBVF_CONTROLLER_H_

#include <optional>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"

namespace cbvf {

enum class GradientMode {
  // Multilinear interpolation of node-wise central differences.
  kCentral,
  // Per candidate, the one-sided difference in the direction of f; the score
  // is the directional derivative of h along the flow.
  kUpwind,
};

// k(x) = argmax_u grad h(x) . f(x, u) over U with h given on a grid. Ties go
// to the lexicographically smallest candidate.
class GreedyController {
 public:
  GreedyController(const System& system, ScalarField h,
                   GradientMode mode = GradientMode::kCentral,
                   std::optional<int> sample_override = std::nullopt);

  // Throws OutOfBoundsError when x is further than half a cell off the grid.
  Vec Control(const Vec& x) const;
  Vec Gradient(const Vec& x) const;
  double Value(const Vec& x) const { return Interpolate(h_, x); }

  const System& system() const { return system_; }
  const ScalarField& field() const { return h_; }
  GradientMode mode() const { return mode_; }

 private:
  System system_;
  ScalarField h_;
  GradientMode mode_;
  std::vector<Vec> candidates_;
  std::vector<ScalarField> central_;  // one field per axis
  std::vector<ScalarField> left_;
  std::vector<ScalarField> right_;
};

struct ThetaLogEntry {
  int interval = 0;
  double t_start = 0.0;
  double theta_hat = 0.0;
};

struct Rollout {
  Trajectory trajectory;
  std::vector<ThetaLogEntry> theta_log;
};

// Greedy feedback recomputed every tau time units and held in between.
// theta_n = 1 - (1 - theta_0) / (n + 1) is strictly increasing towards 1.
class SampleHoldController {
 public:
  SampleHoldController(GreedyController base, double tau, double theta0 = 0.9,
                       double step = kDefaultStep);

  const GreedyController& base() const { return base_; }
  double tau() const { return tau_; }
  double step() const { return step_; }
  double Theta(int n) const;

  // Rolls out from x0 over [0, horizon] and logs, per hold period n,
  //
  //   theta_hat_{n+1} = min_t h(x(t)) / beta(theta_n h(x_n), t - t_n)
  //
  // over the integration samples of the period. Throws DomainError when
  // h(x0) <= 0.
  Rollout Run(const ClassK& alpha, const Vec& x0, double horizon) const;

 private:
  GreedyController base_;
  double tau_;
  double theta0_;
  double step_;
};

}  // namespace cbvf

#endif  // CBVF_CONTROLLER_H_
