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

#include "cbvf/classk.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbvf/error.h"

namespace cbvf {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double TableEval(const TableAlpha& table, double r) {
  const auto& pts = table.points;
  // First breakpoint whose abscissa exceeds r; the segment is the one before.
  auto it = std::upper_bound(
      pts.begin(), pts.end(), r,
      [](double value, const std::array<double, 2>& p) { return value < p[0]; });
  std::size_t hi = static_cast<std::size_t>(it - pts.begin());
  if (hi >= pts.size()) hi = pts.size() - 1;
  if (hi == 0) hi = 1;
  const auto& a = pts[hi - 1];
  const auto& b = pts[hi];
  const double slope = (b[1] - a[1]) / (b[0] - a[0]);
  return a[1] + slope * (r - a[0]);
}

void CheckPositiveFinite(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(field, "must be a positive finite number");
  }
}

}  // namespace

ClassK ClassK::Linear(double gamma) {
  CheckPositiveFinite(gamma, "alpha.gamma");
  return ClassK(LinearAlpha{gamma});
}

ClassK ClassK::Power(double c, double p) {
  CheckPositiveFinite(c, "alpha.c");
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ConfigError("alpha.p", "must be a finite number >= 1");
  }
  return ClassK(PowerAlpha{c, p});
}

ClassK ClassK::Table(std::vector<std::array<double, 2>> points) {
  if (points.size() < 2) {
    throw ConfigError("alpha.points", "need at least two breakpoints");
  }
  if (points[0][0] != 0.0 || points[0][1] != 0.0) {
    throw ConfigError("alpha.points", "first breakpoint must be (0, 0)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!std::isfinite(points[i][0]) || !std::isfinite(points[i][1]) ||
        !(points[i][0] > points[i - 1][0]) ||
        !(points[i][1] > points[i - 1][1])) {
      throw ConfigError("alpha.points[" + std::to_string(i) + "]",
                        "breakpoints must be strictly increasing in r and "
                        "alpha");
    }
  }
  return ClassK(TableAlpha{std::move(points)});
}

ClassK ClassK::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("alpha", "expected an object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("alpha.kind", "missing or not a string");
  }
  const std::string kind = j["kind"].get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ConfigError(std::string("alpha.") + key, "missing or not a number");
    }
    return j[key].get<double>();
  };
  auto allow_only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : j.items()) {
      bool known = key == "kind" || key == "lipschitz_hint";
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ConfigError("alpha." + key, "unknown key");
    }
  };

  ClassK out = [&] {
    if (kind == "linear") {
      allow_only({"gamma"});
      return Linear(number("gamma"));
    }
    if (kind == "power") {
      allow_only({"c", "p"});
      return Power(number("c"), number("p"));
    }
    if (kind == "table") {
      allow_only({"points"});
      if (!j.contains("points") || !j["points"].is_array()) {
        throw ConfigError("alpha.points", "missing or not an array");
      }
      std::vector<std::array<double, 2>> pts;
      for (std::size_t i = 0; i < j["points"].size(); ++i) {
        const auto& p = j["points"][i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number()) {
          throw ConfigError("alpha.points[" + std::to_string(i) + "]",
                            "expected [r, alpha]");
        }
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      return Table(std::move(pts));
    }
    throw ConfigError("alpha.kind", "unknown kind '" + kind + "'");
  }();
  if (j.contains("lipschitz_hint")) {
    out = out.WithLipschitzHint(number("lipschitz_hint"));
  }
  return out;
}

nlohmann::json ClassK::ToJson() const {
  nlohmann::json j = std::visit(
      Overloaded{
          [](const LinearAlpha& a) {
            return nlohmann::json{{"kind", "linear"}, {"gamma", a.gamma}};
          },
          [](const PowerAlpha& a) {
            return nlohmann::json{{"kind", "power"}, {"c", a.c}, {"p", a.p}};
          },
          [](const TableAlpha& a) {
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& p : a.points) pts.push_back({p[0], p[1]});
            return nlohmann::json{{"kind", "table"}, {"points", pts}};
          },
      },
      kind_);
  if (lipschitz_hint_) j["lipschitz_hint"] = *lipschitz_hint_;
  return j;
}

ClassK ClassK::WithFlowOptions(FlowOptions options) const {
  if (!(options.ode_step > 0.0)) {
    throw DomainError("ode_step must be positive");
  }
  ClassK out = *this;
  out.flow_ = options;
  return out;
}

ClassK ClassK::WithLipschitzHint(double hint) const {
  CheckPositiveFinite(hint, "alpha.lipschitz_hint");
  ClassK out = *this;
  out.lipschitz_hint_ = hint;
  return out;
}

bool ClassK::has_closed_form() const {
  return !std::holds_alternative<TableAlpha>(kind_);
}

std::string ClassK::Describe() const { return ToJson().dump(); }

double ClassK::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) {
    throw DomainError("alpha evaluated at negative argument");
  }
  return std::visit(
      Overloaded{
          [r](const LinearAlpha& a) { return a.gamma * r; },
          [r](const PowerAlpha& a) {
            return a.p == 2.0 ? a.c * r * r : a.c * std::pow(r, a.p);
          },
          [r](const TableAlpha& a) { return TableEval(a, r); },
      },
      kind_);
}

double ClassK::Integrate(double r, double t, double sign, bool* blew_up,
                         double* escape_time) const {
  const double h = flow_.ode_step;
  auto rhs = [&](double y) { return sign * (*this)(std::max(y, 0.0)); };
  const auto full_steps = static_cast<long long>(std::floor(t / h));
  const double remainder = t - static_cast<double>(full_steps) * h;
  double y = r;
  auto step = [&](double dt) {
    const double k1 = rhs(y);
    const double k2 = rhs(y + 0.5 * dt * k1);
    const double k3 = rhs(y + 0.5 * dt * k2);
    const double k4 = rhs(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (y < 0.0) y = 0.0;
  };
  for (long long k = 0; k < full_steps; ++k) {
    step(h);
    if (sign > 0.0 && !(y <= flow_.blowup_ceiling)) {
      *blew_up = true;
      *escape_time = static_cast<double>(k + 1) * h;
      return y;
    }
    if (sign < 0.0 && y == 0.0) return 0.0;
  }
  if (remainder > 0.0) step(remainder);
  if (sign > 0.0 && !(y <= flow_.blowup_ceiling)) {
    *blew_up = true;
    *escape_time = t;
  }
  return y;
}

double ClassK::Beta(double r, double t) const {
  if (r < 0.0 || t < 0.0 || std::isnan(r) || std::isnan(t)) {
    throw DomainError("beta requires r >= 0 and t >= 0");
  }
  if (r == 0.0 || t == 0.0) return r;
  if (flow_.use_closed_form) {
    if (const auto* a = std::get_if<LinearAlpha>(&kind_)) {
      return r * std::exp(-a->gamma * t);
    }
    if (const auto* a = std::get_if<PowerAlpha>(&kind_)) {
      if (a->p == 1.0) return r * std::exp(-a->c * t);
      if (a->p == 2.0) return r / (1.0 + a->c * r * t);
      const double q = a->p - 1.0;
      return std::pow(std::pow(r, -q) + a->c * q * t, -1.0 / q);
    }
  }
  bool blew_up = false;
  double escape = 0.0;
  return Integrate(r, t, -1.0, &blew_up, &escape);
}

KappaResult ClassK::Kappa(double r, double t) const {
  if (r < 0.0 || t < 0.0 || std::isnan(r) || std::isnan(t)) {
    throw DomainError("kappa requires r >= 0 and t >= 0");
  }
  KappaResult out;
  if (r == 0.0 || t == 0.0) {
    out.value = r;
    return out;
  }
  if (flow_.use_closed_form) {
    if (const auto* a = std::get_if<LinearAlpha>(&kind_)) {
      out.value = r * std::exp(a->gamma * t);
      return out;
    }
    if (const auto* a = std::get_if<PowerAlpha>(&kind_)) {
      if (a->p == 1.0) {
        out.value = r * std::exp(a->c * t);
        return out;
      }
      const double q = a->p - 1.0;
      const double base = std::pow(r, -q);
      out.escape_time = base / (a->c * q);
      if (t >= out.escape_time) {
        out.blew_up = true;
        return out;
      }
      out.value = a->p == 2.0 ? r / (1.0 - a->c * r * t)
                              : std::pow(base - a->c * q * t, -1.0 / q);
      return out;
    }
  }
  out.value = Integrate(r, t, +1.0, &out.blew_up, &out.escape_time);
  if (!out.blew_up) out.escape_time = std::numeric_limits<double>::infinity();
  return out;
}

double ClassK::ComparisonConstant(double radius) const {
  if (!(radius > 0.0)) throw DomainError("comparison radius must be positive");
  const double L = std::visit(
      Overloaded{
          [](const LinearAlpha& a) { return a.gamma; },
          [radius](const PowerAlpha& a) {
            return a.c * std::pow(radius, a.p - 1.0);
          },
          [this, radius](const TableAlpha& a) {
            // alpha(r)/r is monotone on every linear piece, so the supremum
            // over (0, radius] sits at a breakpoint or at the radius itself.
            double best = (*this)(radius) / radius;
            for (std::size_t i = 1; i < a.points.size(); ++i) {
              if (a.points[i][0] > radius) break;
              best = std::max(best, a.points[i][1] / a.points[i][0]);
            }
            // Limit at 0+ is the first slope; covered when the first
            // breakpoint lies past the radius by the radius term.
            return best;
          },
      },
      kind_);
  if (!std::isfinite(L) || L <= 0.0) {
    throw OverflowError("alpha(r)/r is not bounded on [0, R]");
  }
  return L;
}

double ClassK::SlopeBound(double radius) const {
  if (lipschitz_hint_) return *lipschitz_hint_;
  if (radius < 0.0) radius = 0.0;
  const double L = std::visit(
      Overloaded{
          [](const LinearAlpha& a) { return a.gamma; },
          [radius](const PowerAlpha& a) {
            return a.p == 1.0 ? a.c
                              : a.c * a.p * std::pow(radius, a.p - 1.0);
          },
          [radius](const TableAlpha& a) {
            double best = 0.0;
            for (std::size_t i = 1; i < a.points.size(); ++i) {
              const double slope = (a.points[i][1] - a.points[i - 1][1]) /
                                   (a.points[i][0] - a.points[i - 1][0]);
              best = std::max(best, slope);
              if (a.points[i][0] >= radius) break;
            }
            return best;
          },
      },
      kind_);
  if (!std::isfinite(L)) throw OverflowError("alpha slope bound not finite");
  return L;
}

}  // namespace cbvf
