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

#include "cbvf/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "cbvf/error.h"

namespace cbvf {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename to " + path.string() + " failed: " + ec.message());
}

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j) {
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::string FieldCsv(const ScalarField& field) {
  const Grid& grid = field.grid;
  std::string out;
  for (int a = 0; a < grid.dim(); ++a) out += "x" + std::to_string(a + 1) + ",";
  out += "value\n";
  for (std::int64_t n = 0; n < grid.size(); ++n) {
    const Vec x = grid.Point(n);
    for (int a = 0; a < grid.dim(); ++a) {
      out += FormatDouble(x[a]);
      out += ',';
    }
    out += FormatDouble(field.values[n]);
    out += '\n';
  }
  return out;
}

nlohmann::json FieldSidecar(const ScalarField& field, double horizon) {
  const Grid& grid = field.grid;
  nlohmann::json lo = nlohmann::json::array();
  nlohmann::json hi = nlohmann::json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    lo.push_back(grid.lo(a));
    hi.push_back(grid.hi(a));
  }
  return {{"lo", lo},
          {"hi", hi},
          {"counts", grid.counts()},
          {"label", field.label},
          {"horizon", horizon}};
}

void WriteField(const std::filesystem::path& dir, const std::string& stem,
                const ScalarField& field, double horizon) {
  WriteFileAtomic(dir / (stem + ".csv"), FieldCsv(field));
  WriteJsonFile(dir / (stem + ".json"), FieldSidecar(field, horizon));
}

std::vector<std::filesystem::path> WriteValueSeries(
    const std::filesystem::path& dir, const ValueSeries& series) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < series.fields.size(); ++k) {
    const std::string stem = "v_T" + FormatDouble(series.checkpoints[k]);
    WriteField(dir, stem, series.fields[k], series.checkpoints[k]);
    paths.push_back(dir / (stem + ".csv"));
  }
  return paths;
}

std::string TrajectoryCsv(const Trajectory& trajectory) {
  const int n = trajectory.states.empty()
                    ? 0
                    : static_cast<int>(trajectory.states.front().size());
  const int m = trajectory.controls.empty()
                    ? 0
                    : static_cast<int>(trajectory.controls.front().size());
  std::string out = "t";
  for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  for (int i = 0; i < m; ++i) out += ",u" + std::to_string(i + 1);
  out += '\n';
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out += FormatDouble(trajectory.times[k]);
    for (int i = 0; i < n; ++i) out += "," + FormatDouble(trajectory.states[k][i]);
    if (k < trajectory.controls.size()) {
      for (int i = 0; i < m; ++i) {
        out += "," + FormatDouble(trajectory.controls[k][i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::string ThetaLogCsv(const std::vector<ThetaLogEntry>& log) {
  std::string out = "interval,t_start,theta_hat\n";
  for (const auto& e : log) {
    out += std::to_string(e.interval) + "," + FormatDouble(e.t_start) + "," +
           FormatDouble(e.theta_hat) + "\n";
  }
  return out;
}

std::string ConvergenceCsv(const std::vector<ConvergencePoint>& history) {
  std::string out = "T,sup_change\n";
  for (const auto& p : history) {
    out += FormatDouble(p.T) + "," + FormatDouble(p.sup_change) + "\n";
  }
  return out;
}

}  // namespace cbvf
