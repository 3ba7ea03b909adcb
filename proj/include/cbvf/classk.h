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

#ifndef CBVF_CLASSK_H_
#define CBVF_CLASSK_H_

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cbvf {

struct LinearAlpha {
  double gamma = 1.0;
};

struct PowerAlpha {
  double c = 1.0;
  double p = 2.0;
};

// Monotone piecewise-linear alpha. Breakpoints start at (0, 0) and are
// strictly increasing in both coordinates; beyond the last breakpoint the
// last segment is extended linearly.
struct TableAlpha {
  std::vector<std::array<double, 2>> points;
};

// Integration settings for the flows generated by alpha.
struct FlowOptions {
  double ode_step = 1e-3;
  double blowup_ceiling = 1e12;
  // When false, linear and power specs also go through RK4.
  bool use_closed_form = true;
};

// Outcome of integrating the growth flow y' = alpha(y). When `blew_up` is
// set, `value` is meaningless and `escape_time` estimates b_alpha(r).
struct KappaResult {
  double value = 0.0;
  bool blew_up = false;
  double escape_time = std::numeric_limits<double>::infinity();
};

// A locally Lipschitz class-K function alpha together with the two flows it
// induces:
//
//   beta(r, t):  solution of y' = -alpha(y), y(0) = r   (decay, class KL)
//   kappa(r, t): solution of y' = +alpha(y), y(0) = r   (growth, may blow up)
//
// Instances are immutable and all evaluation is pure.
class ClassK {
 public:
  using Kind = std::variant<LinearAlpha, PowerAlpha, TableAlpha>;

  static ClassK Linear(double gamma);
  static ClassK Power(double c, double p);
  static ClassK Table(std::vector<std::array<double, 2>> points);

  // Parses {"kind":"linear","gamma":..} | {"kind":"power","c":..,"p":..} |
  // {"kind":"table","points":[[r,a],...]}, with an optional "lipschitz_hint".
  // Throws ConfigError on unknown keys or invalid parameters.
  static ClassK FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  ClassK WithFlowOptions(FlowOptions options) const;
  ClassK WithLipschitzHint(double hint) const;

  const Kind& kind() const { return kind_; }
  const FlowOptions& flow_options() const { return flow_; }
  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }
  bool has_closed_form() const;
  std::string Describe() const;

  // alpha(r). Throws DomainError for r < 0.
  double operator()(double r) const;
  double Eval(double r) const { return (*this)(r); }

  // beta_alpha(r, t), clamped at 0 from below.
  double Beta(double r, double t) const;

  // kappa_alpha(r, t), or a blowup signal when t >= b_alpha(r).
  KappaResult Kappa(double r, double t) const;

  // Some L with alpha(r) <= L r for all r in [0, radius]; this gives
  // beta(r, t) >= r exp(-L t) on that range. Throws OverflowError if the
  // bound is not finite.
  double ComparisonConstant(double radius) const;

  // Upper bound on the slope of alpha over [0, radius]; used by the CFL
  // restriction of the grid solver. The Lipschitz hint wins when present.
  double SlopeBound(double radius) const;

 private:
  explicit ClassK(Kind kind) : kind_(std::move(kind)) {}

  double Integrate(double r, double t, double sign, bool* blew_up,
                   double* escape_time) const;

  Kind kind_;
  FlowOptions flow_;
  std::optional<double> lipschitz_hint_;
};

}  // namespace cbvf

#endif  // CBVF_CLASSK_H_
