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

// File formats. Doubles are printed in shortest round-trip form so repeated
// runs produce byte-identical files; every write goes through a temporary
// file and a rename.

#ifndef CBVF_IO_H_
#define CBVF_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "cbvf/controller.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"
#include "cbvf/synth.h"
#include "json.hpp"

namespace cbvf {

std::string FormatDouble(double value);

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& content);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

// "x1,...,xn,value", one row per node in storage order.
std::string FieldCsv(const ScalarField& field);
// {lo, hi, counts, label, horizon}
nlohmann::json FieldSidecar(const ScalarField& field, double horizon);
// <stem>.csv and <stem>.json
void WriteField(const std::filesystem::path& dir, const std::string& stem,
                const ScalarField& field, double horizon);
// v_T<T>.csv/.json per checkpoint. Returns the CSV paths.
std::vector<std::filesystem::path> WriteValueSeries(
    const std::filesystem::path& dir, const ValueSeries& series);

// "t,x1,...,xn,u1,...,um"
std::string TrajectoryCsv(const Trajectory& trajectory);
// "interval,t_start,theta_hat"
std::string ThetaLogCsv(const std::vector<ThetaLogEntry>& log);
// "T,sup_change"
std::string ConvergenceCsv(const std::vector<ConvergencePoint>& history);

}  // namespace cbvf

#endif  // CBVF_IO_H_
