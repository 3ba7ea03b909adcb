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

#ifndef CBVF_TESTS_TEST_UTIL_H_
#define CBVF_TESTS_TEST_UTIL_H_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cbvf/classk.h"
#include "cbvf/dynamics.h"
#include "cbvf/grid.h"

namespace cbvf::testing {

struct NamedAlpha {
  std::string name;
  ClassK alpha;
};

// The class-K functions exercised by the property tests.
inline std::vector<NamedAlpha> BundledAlphas() {
  std::vector<std::array<double, 2>> square;
  for (int i = 0; i <= 40; ++i) {
    const double r = 0.25 * i;
    square.push_back({r, r * r});
  }
  return {
      {"linear_1", ClassK::Linear(1.0)},
      {"linear_3", ClassK::Linear(3.0)},
      {"power_1_2", ClassK::Power(1.0, 2.0)},
      {"power_half_3", ClassK::Power(0.5, 3.0)},
      {"table_identity", ClassK::Table({{0, 0}, {1, 1}, {20, 20}})},
      {"table_square", ClassK::Table(square)},
      {"table_saturating", ClassK::Table({{0, 0}, {1, 1}, {5, 1.5}})},
  };
}

inline Grid Grid1D(double lo, double hi, int n) {
  return Grid(MakeVec({lo}), MakeVec({hi}), {n});
}

inline Grid Grid2D(double lo1, double hi1, double lo2, double hi2, int n1,
                   int n2) {
  return Grid(MakeVec({lo1, lo2}), MakeVec({hi1, hi2}), {n1, n2});
}

inline double OneMinusAbs(const Vec& x) { return 1.0 - std::abs(x[0]); }
inline double OneMinusAbsPlus(const Vec& x) {
  return std::max(0.0, 1.0 - std::abs(x[0]));
}

}  // namespace cbvf::testing

#endif  // CBVF_TESTS_TEST_UTIL_H_
