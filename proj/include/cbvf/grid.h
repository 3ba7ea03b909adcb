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

#ifndef CBVF_GRID_H_
#define CBVF_GRID_H_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbvf/dynamics.h"

namespace cbvf {

using MultiIndex = std::array<int, kMaxDim>;

// Uniform rectangular grid over [lo, hi] with counts[i] >= 3 nodes per axis.
// Nodes are stored row-major: the last axis varies fastest.
class Grid {
 public:
  Grid(Vec lo, Vec hi, std::vector<int> counts);

  int dim() const { return dim_; }
  std::int64_t size() const { return size_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  int count(int axis) const { return counts_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double max_spacing() const;
  std::int64_t stride(int axis) const { return strides_[axis]; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::vector<int>& counts() const { return counts_; }

  MultiIndex Unflatten(std::int64_t node) const;
  std::int64_t Flatten(const MultiIndex& index) const;
  Vec Point(std::int64_t node) const;
  // Distance, in cells, from the node to the nearest grid face.
  int CellsFromBoundary(std::int64_t node) const;

  bool operator==(const Grid& other) const;

 private:
  int dim_;
  Vec lo_;
  Vec hi_;
  std::vector<int> counts_;
  std::vector<double> spacing_;
  std::vector<std::int64_t> strides_;
  std::int64_t size_;
};

// One finite value per grid node.
struct ScalarField {
  ScalarField(Grid grid, std::vector<double> values, std::string label = "");
  ScalarField(Grid grid, double fill, std::string label = "");

  Grid grid;
  std::vector<double> values;
  std::string label;

  double Max() const;
  double Min() const;
};

// Snapshots v(., T_k) of a time-marched value function. checkpoints[0] is
// 0 and fields[0] is the initial condition.
struct ValueSeries {
  std::vector<double> checkpoints;
  std::vector<ScalarField> fields;
};

// Per-node one-sided differences, stored as [node * dim + axis].
struct UpwindGradients {
  int dim = 0;
  std::vector<double> left;
  std::vector<double> right;
};

enum class StencilOrder { kFirst = 1, kEno2 = 2 };

// First-order one-sided differences (or second-order ENO). Missing
// neighbours past a face are ghost values extrapolated linearly from the
// interior slope.
UpwindGradients ComputeUpwindGradients(
    const ScalarField& field, StencilOrder order = StencilOrder::kFirst);

// Multilinear interpolation; exact on multilinear functions. Points up to
// half a cell outside the grid are clamped onto it (flagged through
// `clamped`); anything further throws OutOfBoundsError.
double Interpolate(const ScalarField& field, const Vec& x,
                   bool* clamped = nullptr);

// Samples fn at every node. Throws OverflowError naming the first node with
// a non-finite value.
ScalarField Discretize(const Grid& grid,
                       const std::function<double(const Vec&)>& fn,
                       std::string label = "");

// Largest one-sided difference quotient |g(x + h e_i) - g(x)| / h over all
// nodes and axes.
double EstimateLipschitz(const ScalarField& field);

double SupNormDiff(const ScalarField& a, const ScalarField& b);

}  // namespace cbvf

#endif  // CBVF_GRID_H_
