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

#include "cbvf/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cbvf/error.h"
#include "cbvf/expression.h"

namespace cbvf {

FunctionSpec BuiltinFunction(const std::string& name) {
  if (name == "one_minus_abs") {
    return {"1 - |x1|", [](const Vec& x) { return 1.0 - std::abs(x[0]); }};
  }
  if (name == "unit_disk") {
    return {"1 - x1^2 - x2^2",
            [](const Vec& x) { return 1.0 - x[0] * x[0] - x[1] * x[1]; }, 2};
  }
  if (name == "one_minus_x1_sq") {
    return {"1 - x1^2", [](const Vec& x) { return 1.0 - x[0] * x[0]; }};
  }
  throw LookupError("unknown builtin function '" + name + "'");
}

std::vector<std::string> BuiltinFunctionNames() {
  return {"one_minus_abs", "one_minus_x1_sq", "unit_disk"};
}

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  [[noreturn]] void Fail(const std::string& path, const std::string& what) const {
    throw ConfigError(Locate(path), what);
  }

  // Field path plus the line of the first occurrence of its last key.
  std::string Locate(const std::string& path) const {
    std::string key = path;
    const auto dot = key.find_last_of('.');
    if (dot != std::string::npos) key = key.substr(dot + 1);
    const auto bracket = key.find('[');
    if (bracket != std::string::npos) key = key.substr(0, bracket);
    const auto at = text_.find("\"" + key + "\"");
    if (at == std::string::npos) return path;
    const auto line = 1 + std::count(text_.begin(), text_.begin() + at, '\n');
    return path + " (line " + std::to_string(line) + ")";
  }

  void CheckKeys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) Fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : allowed) known = known || it.key() == k;
      if (!known) {
        Fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
      }
    }
  }

  double Number(const json& j, const std::string& path) const {
    if (!j.is_number()) Fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) Fail(path, "must be finite");
    return v;
  }

  double Positive(const json& j, const std::string& path) const {
    const double v = Number(j, path);
    if (!(v > 0.0)) Fail(path, "must be positive");
    return v;
  }

  std::int64_t Integer(const json& j, const std::string& path,
                       std::int64_t min) const {
    if (!j.is_number_integer()) Fail(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < min) Fail(path, "must be >= " + std::to_string(min));
    return v;
  }

  std::string String(const json& j, const std::string& path) const {
    if (!j.is_string()) Fail(path, "expected a string");
    return j.get<std::string>();
  }

  Vec Vector(const json& j, const std::string& path) const {
    if (!j.is_array() || j.empty() || j.size() > kMaxDim) {
      Fail(path, "expected an array of 1 to 3 numbers");
    }
    Vec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
      v[static_cast<int>(i)] = Number(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
  }

  ClassK Alpha(const json& j, const std::string& path) const {
    try {
      return ClassK::FromJson(j);
    } catch (const ConfigError& e) {
      std::string where = e.where();
      if (where.rfind("alpha", 0) == 0) where = path + where.substr(5);
      const std::string what = e.what();
      throw ConfigError(Locate(where), what.substr(e.where().size() + 2));
    }
  }

  ControlSet Controls(const json& j, const std::string& path) const {
    CheckKeys(j, path, {"finite", "box"});
    if (j.size() != 1) Fail(path, "expected exactly one of finite, box");
    if (j.contains("finite")) {
      const json& list = j["finite"];
      if (!list.is_array() || list.empty()) {
        Fail(path + ".finite", "expected a non-empty array");
      }
      std::vector<Vec> values;
      for (std::size_t i = 0; i < list.size(); ++i) {
        values.push_back(
            Vector(list[i], path + ".finite[" + std::to_string(i) + "]"));
        if (values.back().size() != values.front().size()) {
          Fail(path + ".finite", "control vectors differ in length");
        }
      }
      return ControlSet::Finite(std::move(values));
    }
    const json& box = j["box"];
    const std::string bp = path + ".box";
    CheckKeys(box, bp, {"lower", "upper", "sample_count"});
    if (!box.contains("lower") || !box.contains("upper")) {
      Fail(bp, "needs lower and upper");
    }
    const Vec lower = Vector(box["lower"], bp + ".lower");
    const Vec upper = Vector(box["upper"], bp + ".upper");
    if (lower.size() != upper.size()) Fail(bp, "lower/upper differ in length");
    for (int i = 0; i < lower.size(); ++i) {
      if (!(lower[i] <= upper[i])) Fail(bp, "needs lower <= upper");
    }
    int samples = 9;
    if (box.contains("sample_count")) {
      samples = static_cast<int>(
          Integer(box["sample_count"], bp + ".sample_count", 2));
    }
    return ControlSet::Box(lower, upper, samples);
  }

  System ParseSystem(const json& j) const {
    if (j.is_string()) {
      try {
        return BuiltinSystem(j.get<std::string>());
      } catch (const LookupError& e) {
        Fail("system", e.what());
      }
    }
    if (!j.is_object()) Fail("system", "expected a name or an object");
    if (j.contains("builtin")) {
      CheckKeys(j, "system", {"builtin", "controls"});
      const std::string name = String(j["builtin"], "system.builtin");
      System base = [&] {
        try {
          return BuiltinSystem(name);
        } catch (const LookupError& e) {
          Fail("system.builtin", e.what());
        }
      }();
      if (!j.contains("controls")) return base;
      ControlSet controls = Controls(j["controls"], "system.controls");
      if (controls.dim() != base.control_dim()) {
        Fail("system.controls", "control dimension does not match " + name);
      }
      return base.WithControls(std::move(controls), name + "_custom_controls");
    }
    CheckKeys(j, "system", {"name", "dim", "f", "controls", "lipschitz_hint"});
    for (const char* key : {"dim", "f", "controls"}) {
      if (!j.contains(key)) Fail(std::string("system.") + key, "missing");
    }
    const std::string name =
        j.contains("name") ? String(j["name"], "system.name") : "custom";
    const int dim = static_cast<int>(Integer(j["dim"], "system.dim", 1));
    if (dim > kMaxDim) Fail("system.dim", "must be <= 3");
    ControlSet controls = Controls(j["controls"], "system.controls");
    const json& f = j["f"];
    if (!f.is_array() || static_cast<int>(f.size()) != dim) {
      Fail("system.f", "expected one expression per state dimension");
    }
    std::vector<Expression> exprs;
    for (int i = 0; i < dim; ++i) {
      const std::string path = "system.f[" + std::to_string(i) + "]";
      exprs.push_back(Expression::Parse(String(f[i], path), Locate(path)));
      if (exprs.back().max_state_index() > dim) {
        Fail(path, "uses x" + std::to_string(exprs.back().max_state_index()) +
                       " but dim is " + std::to_string(dim));
      }
      if (exprs.back().max_control_index() > controls.dim()) {
        Fail(path, "uses a control beyond the control dimension");
      }
    }
    std::optional<double> hint;
    if (j.contains("lipschitz_hint")) {
      hint = Positive(j["lipschitz_hint"], "system.lipschitz_hint");
    }
    DynamicsFn fn = [exprs, dim](const Vec& x, const Vec& u) {
      Vec out(dim);
      for (int i = 0; i < dim; ++i) out[i] = exprs[i].Eval(x, u);
      return out;
    };
    return System(name, dim, std::move(fn), std::move(controls), hint);
  }

  Grid ParseGrid(const json& j, int dim) const {
    CheckKeys(j, "grid", {"lo", "hi", "counts"});
    for (const char* key : {"lo", "hi", "counts"}) {
      if (!j.contains(key)) Fail(std::string("grid.") + key, "missing");
    }
    const Vec lo = Vector(j["lo"], "grid.lo");
    const Vec hi = Vector(j["hi"], "grid.hi");
    const json& c = j["counts"];
    if (!c.is_array()) Fail("grid.counts", "expected an array");
    std::vector<int> counts;
    for (std::size_t i = 0; i < c.size(); ++i) {
      counts.push_back(static_cast<int>(
          Integer(c[i], "grid.counts[" + std::to_string(i) + "]", 3)));
    }
    if (lo.size() != dim || hi.size() != dim ||
        static_cast<int>(counts.size()) != dim) {
      Fail("grid", "dimension must match the system (" + std::to_string(dim) +
                       ")");
    }
    try {
      return Grid(lo, hi, counts);
    } catch (const ShapeError& e) {
      Fail("grid", e.what());
    }
  }

  FunctionSpec Function(const json& j, const std::string& path, int dim) const {
    std::string text;
    if (j.is_object()) {
      CheckKeys(j, path, {"expr", "builtin"});
      if (j.size() != 1) Fail(path, "expected exactly one of expr, builtin");
      if (j.contains("builtin")) {
        const std::string name = String(j["builtin"], path + ".builtin");
        FunctionSpec spec;
        try {
          spec = BuiltinFunction(name);
        } catch (const LookupError& e) {
          Fail(path + ".builtin", e.what());
        }
        if (spec.min_dim > dim) Fail(path + ".builtin", "needs dim >= 2");
        return spec;
      }
      text = String(j["expr"], path + ".expr");
    } else {
      text = String(j, path);
    }
    Expression e = Expression::Parse(text, Locate(path));
    if (e.max_control_index() > 0) Fail(path, "may not use controls");
    if (e.max_state_index() > dim) {
      Fail(path, "uses x" + std::to_string(e.max_state_index()) +
                     " but dim is " + std::to_string(dim));
    }
    return {text, [e](const Vec& x) { return e.Eval(x); }};
  }

  SolverParams Solver(const json& j) const {
    SolverParams p;
    CheckKeys(j, "solver", {"cfl", "checkpoints", "dissipation",
                            "control_resolution", "max_steps", "stencil"});
    if (j.contains("cfl")) {
      p.cfl = Positive(j["cfl"], "solver.cfl");
      if (p.cfl > 1.0) Fail("solver.cfl", "must lie in (0, 1]");
    }
    if (j.contains("checkpoints")) {
      const json& c = j["checkpoints"];
      if (!c.is_array() || c.empty()) Fail("solver.checkpoints", "expected an array");
      p.checkpoints.clear();
      for (std::size_t i = 0; i < c.size(); ++i) {
        p.checkpoints.push_back(
            Number(c[i], "solver.checkpoints[" + std::to_string(i) + "]"));
      }
      if (p.checkpoints.front() != 0.0) Fail("solver.checkpoints", "must start at 0");
      for (std::size_t i = 1; i < p.checkpoints.size(); ++i) {
        if (!(p.checkpoints[i] > p.checkpoints[i - 1])) {
          Fail("solver.checkpoints", "must be strictly increasing");
        }
      }
    }
    if (j.contains("dissipation")) {
      const std::string d = String(j["dissipation"], "solver.dissipation");
      if (d == "local") {
        p.dissipation = Dissipation::kLocal;
      } else if (d == "global") {
        p.dissipation = Dissipation::kGlobal;
      } else {
        Fail("solver.dissipation", "expected local or global");
      }
    }
    if (j.contains("control_resolution")) {
      p.control_resolution = static_cast<int>(
          Integer(j["control_resolution"], "solver.control_resolution", 2));
    }
    if (j.contains("max_steps")) {
      p.max_steps = Integer(j["max_steps"], "solver.max_steps", 1);
    }
    if (j.contains("stencil")) {
      const std::string s = String(j["stencil"], "solver.stencil");
      if (s == "first") {
        p.stencil = StencilOrder::kFirst;
      } else if (s == "eno2") {
        p.stencil = StencilOrder::kEno2;
      } else {
        Fail("solver.stencil", "expected first or eno2");
      }
    }
    return p;
  }

  VerifyConfig Verify(const json& j, int dim) const {
    VerifyConfig v;
    CheckKeys(j, "verify",
              {"tol", "margin_band", "theta", "horizon", "initial_states",
               "controller", "tau", "barrier_tol", "gradient_mode",
               "classical_samples", "classical_tol", "alphas"});
    if (j.contains("tol")) v.tol = Positive(j["tol"], "verify.tol");
    if (j.contains("margin_band")) {
      v.margin_band = static_cast<int>(Integer(j["margin_band"], "verify.margin_band", 0));
    }
    if (j.contains("theta")) {
      v.theta = Number(j["theta"], "verify.theta");
      if (!(v.theta >= 0.0 && v.theta < 1.0)) Fail("verify.theta", "must lie in [0, 1)");
    }
    if (j.contains("horizon")) v.horizon = Positive(j["horizon"], "verify.horizon");
    if (j.contains("initial_states")) {
      const json& s = j["initial_states"];
      if (s.is_number_integer()) {
        v.initial_count = static_cast<int>(Integer(s, "verify.initial_states", 1));
      } else if (s.is_array() && !s.empty()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          const std::string path = "verify.initial_states[" + std::to_string(i) + "]";
          v.initial_states.push_back(Vector(s[i], path));
          if (v.initial_states.back().size() != dim) Fail(path, "wrong dimension");
        }
      } else {
        Fail("verify.initial_states", "expected a count or a list of states");
      }
    }
    if (j.contains("controller")) {
      const std::string c = String(j["controller"], "verify.controller");
      if (c == "greedy") {
        v.controller = ControllerKind::kGreedy;
      } else if (c == "sample_hold") {
        v.controller = ControllerKind::kSampleHold;
      } else {
        Fail("verify.controller", "expected greedy or sample_hold");
      }
    }
    if (j.contains("tau")) v.tau = Positive(j["tau"], "verify.tau");
    if (j.contains("barrier_tol")) {
      v.barrier_tol = Positive(j["barrier_tol"], "verify.barrier_tol");
    }
    if (j.contains("gradient_mode")) {
      const std::string m = String(j["gradient_mode"], "verify.gradient_mode");
      if (m == "central") {
        v.gradient_mode = GradientMode::kCentral;
      } else if (m == "upwind") {
        v.gradient_mode = GradientMode::kUpwind;
      } else {
        Fail("verify.gradient_mode", "expected central or upwind");
      }
    }
    if (j.contains("classical_samples")) {
      v.classical_samples = static_cast<int>(
          Integer(j["classical_samples"], "verify.classical_samples", 1));
    }
    if (j.contains("classical_tol")) {
      v.classical_tol = Positive(j["classical_tol"], "verify.classical_tol");
    }
    if (j.contains("alphas")) {
      const json& a = j["alphas"];
      if (!a.is_array()) Fail("verify.alphas", "expected an array");
      for (std::size_t i = 0; i < a.size(); ++i) {
        v.alphas.push_back(Alpha(a[i], "verify.alphas[" + std::to_string(i) + "]"));
      }
    }
    return v;
  }

  SynthConfig Synth(const json& j) const {
    SynthConfig s;
    CheckKeys(j, "synth", {"window", "spacing", "tol", "max_T", "verify_checkpoints"});
    if (j.contains("window")) {
      s.limit.window = static_cast<int>(Integer(j["window"], "synth.window", 2));
    }
    if (j.contains("spacing")) s.limit.spacing = Positive(j["spacing"], "synth.spacing");
    if (j.contains("tol")) s.limit.tol = Positive(j["tol"], "synth.tol");
    if (j.contains("max_T")) s.limit.max_T = Positive(j["max_T"], "synth.max_T");
    if (j.contains("verify_checkpoints")) {
      const json& c = j["verify_checkpoints"];
      if (!c.is_array() || c.empty()) {
        Fail("synth.verify_checkpoints", "expected an array");
      }
      for (std::size_t i = 0; i < c.size(); ++i) {
        s.verify_checkpoints.push_back(Number(
            c[i], "synth.verify_checkpoints[" + std::to_string(i) + "]"));
      }
      if (s.verify_checkpoints.front() != 0.0) {
        Fail("synth.verify_checkpoints", "must start at 0");
      }
      for (std::size_t i = 1; i < s.verify_checkpoints.size(); ++i) {
        if (!(s.verify_checkpoints[i] > s.verify_checkpoints[i - 1])) {
          Fail("synth.verify_checkpoints", "must be strictly increasing");
        }
      }
    }
    return s;
  }

 private:
  const std::string& text_;
};

}  // namespace

RunConfig ParseRunConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
    throw ConfigError("line " + std::to_string(line), "malformed JSON");
  }
  const Parser p(text);
  p.CheckKeys(j, "", {"system", "alpha", "grid", "g", "h2", "solver", "verify",
                      "synth", "seed"});
  for (const char* key : {"system", "grid", "g"}) {
    if (!j.contains(key)) p.Fail(key, "missing required field");
  }
  RunConfig cfg;
  cfg.system = p.ParseSystem(j["system"]);
  cfg.system_json = j["system"];
  const int dim = cfg.system->dim();
  if (j.contains("alpha")) cfg.alpha = p.Alpha(j["alpha"], "alpha");
  cfg.grid = p.ParseGrid(j["grid"], dim);
  cfg.g = p.Function(j["g"], "g", dim);
  if (j.contains("h2")) cfg.h2 = p.Function(j["h2"], "h2", dim);
  if (j.contains("solver")) cfg.solver = p.Solver(j["solver"]);
  if (j.contains("verify")) cfg.verify = p.Verify(j["verify"], dim);
  if (j.contains("synth")) cfg.synth = p.Synth(j["synth"]);
  if (j.contains("seed")) {
    cfg.seed = static_cast<std::uint64_t>(p.Integer(j["seed"], "seed", 0));
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

}  // namespace cbvf
