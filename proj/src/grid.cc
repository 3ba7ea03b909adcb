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

#include "cbvf/grid.h"

#include <algorithm>
#include <cmath>

#include "cbvf/error.h"

namespace cbvf {

Grid::Grid(Vec lo, Vec hi, std::vector<int> counts)
    : dim_(static_cast<int>(counts.size())),
      lo_(std::move(lo)),
      hi_(std::move(hi)),
      counts_(std::move(counts)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw ShapeError("grid dimension must be 1..3");
  if (lo_.size() != dim_ || hi_.size() != dim_) {
    throw ShapeError("grid bounds and counts disagree in dimension");
  }
  size_ = 1;
  spacing_.resize(dim_);
  strides_.assign(dim_, 1);
  for (int i = 0; i < dim_; ++i) {
    if (counts_[i] < 3) throw ShapeError("grid needs >= 3 nodes per axis");
    if (!(lo_[i] < hi_[i]) || !std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) {
      throw ShapeError("grid bounds must satisfy lo < hi");
    }
    spacing_[i] = (hi_[i] - lo_[i]) / (counts_[i] - 1);
    size_ *= counts_[i];
  }
  for (int i = dim_ - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * counts_[i + 1];
}

double Grid::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

MultiIndex Grid::Unflatten(std::int64_t node) const {
  MultiIndex idx{};
  for (int i = 0; i < dim_; ++i) {
    idx[i] = static_cast<int>(node / strides_[i]);
    node %= strides_[i];
  }
  return idx;
}

std::int64_t Grid::Flatten(const MultiIndex& index) const {
  std::int64_t node = 0;
  for (int i = 0; i < dim_; ++i) node += index[i] * strides_[i];
  return node;
}

Vec Grid::Point(std::int64_t node) const {
  const MultiIndex idx = Unflatten(node);
  Vec x(dim_);
  for (int i = 0; i < dim_; ++i) {
    // Last node lands exactly on hi.
    x[i] = idx[i] == counts_[i] - 1 ? hi_[i] : lo_[i] + idx[i] * spacing_[i];
  }
  return x;
}

int Grid::CellsFromBoundary(std::int64_t node) const {
  const MultiIndex idx = Unflatten(node);
  int best = counts_[0];
  for (int i = 0; i < dim_; ++i) {
    best = std::min({best, idx[i], counts_[i] - 1 - idx[i]});
  }
  return best;
}

bool Grid::operator==(const Grid& other) const {
  return dim_ == other.dim_ && counts_ == other.counts_ && lo_ == other.lo_ &&
         hi_ == other.hi_;
}

ScalarField::ScalarField(Grid g, std::vector<double> v, std::string l)
    : grid(std::move(g)), values(std::move(v)), label(std::move(l)) {
  if (static_cast<std::int64_t>(values.size()) != grid.size()) {
    throw ShapeError("field has " + std::to_string(values.size()) +
                     " values for a grid of " + std::to_string(grid.size()) +
                     " nodes");
  }
}

ScalarField::ScalarField(Grid g, double fill, std::string l)
    : grid(std::move(g)), label(std::move(l)) {
  values.assign(static_cast<std::size_t>(grid.size()), fill);
}

double ScalarField::Max() const {
  return *std::max_element(values.begin(), values.end());
}

double ScalarField::Min() const {
  return *std::min_element(values.begin(), values.end());
}

namespace {

// Value at offset k along an axis from the node at position `pos` (line
// index), with linear extrapolation past either face.
double AxisValue(const std::vector<double>& v, std::int64_t base,
                 std::int64_t stride, int n, int k) {
  if (k < 0) {
    const double v0 = v[base];
    const double v1 = v[base + stride];
    return v0 + k * (v1 - v0);
  }
  if (k > n - 1) {
    const double a = v[base + (n - 1) * stride];
    const double b = v[base + (n - 2) * stride];
    return a + (k - n + 1) * (a - b);
  }
  return v[base + k * stride];
}

}  // namespace

UpwindGradients ComputeUpwindGradients(const ScalarField& field,
                                       StencilOrder order) {
  const Grid& g = field.grid;
  const int d = g.dim();
  UpwindGradients out;
  out.dim = d;
  out.left.resize(static_cast<std::size_t>(g.size() * d));
  out.right.resize(static_cast<std::size_t>(g.size() * d));
  const auto& v = field.values;
  for (std::int64_t node = 0; node < g.size(); ++node) {
    const MultiIndex idx = g.Unflatten(node);
    for (int a = 0; a < d; ++a) {
      const std::int64_t stride = g.stride(a);
      const std::int64_t base = node - idx[a] * stride;
      const int n = g.count(a);
      const int i = idx[a];
      const double dx = g.spacing(a);
      auto at = [&](int k) { return AxisValue(v, base, stride, n, k); };
      double left = (at(i) - at(i - 1)) / dx;
      double right = (at(i + 1) - at(i)) / dx;
      if (order == StencilOrder::kEno2) {
        auto d2 = [&](int k) {
          return (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (dx * dx);
        };
        auto pick = [](double a1, double a2) {
          return std::abs(a1) <= std::abs(a2) ? a1 : a2;
        };
        left += 0.5 * dx * pick(d2(i - 1), d2(i));
        right -= 0.5 * dx * pick(d2(i), d2(i + 1));
      }
      out.left[node * d + a] = left;
      out.right[node * d + a] = right;
    }
  }
  return out;
}

double Interpolate(const ScalarField& field, const Vec& x, bool* clamped) {
  const Grid& g = field.grid;
  const int d = g.dim();
  if (x.size() != d) throw ShapeError("interpolation point dimension mismatch");
  std::array<int, kMaxDim> cell{};
  std::array<double, kMaxDim> frac{};
  bool any_clamp = false;
  for (int a = 0; a < d; ++a) {
    const double dx = g.spacing(a);
    double xi = x[a];
    if (!(xi >= g.lo(a) - 0.5 * dx && xi <= g.hi(a) + 0.5 * dx)) {
      throw OutOfBoundsError("point outside grid along axis " +
                             std::to_string(a));
    }
    if (xi < g.lo(a) || xi > g.hi(a)) {
      any_clamp = true;
      xi = std::clamp(xi, g.lo(a), g.hi(a));
    }
    const double s = (xi - g.lo(a)) / dx;
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, g.count(a) - 2);
    cell[a] = c;
    frac[a] = std::clamp(s - c, 0.0, 1.0);
  }
  if (clamped) *clamped = any_clamp;
  double result = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::int64_t node = 0;
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> (d - 1 - a)) & 1;
      weight *= bit ? frac[a] : 1.0 - frac[a];
      node += (cell[a] + bit) * g.stride(a);
    }
    if (weight != 0.0) result += weight * field.values[node];
  }
  return result;
}

ScalarField Discretize(const Grid& grid,
                       const std::function<double(const Vec&)>& fn,
                       std::string label) {
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (std::int64_t node = 0; node < grid.size(); ++node) {
    const double v = fn(grid.Point(node));
    if (!std::isfinite(v)) {
      throw OverflowError("non-finite value at node " + std::to_string(node));
    }
    values[node] = v;
  }
  return ScalarField(grid, std::move(values), std::move(label));
}

double EstimateLipschitz(const ScalarField& field) {
  const Grid& g = field.grid;
  double best = 0.0;
  for (std::int64_t node = 0; node < g.size(); ++node) {
    const MultiIndex idx = g.Unflatten(node);
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[a] + 1 >= g.count(a)) continue;
      const double diff =
          std::abs(field.values[node + g.stride(a)] - field.values[node]);
      best = std::max(best, diff / g.spacing(a));
    }
  }
  return best;
}

double SupNormDiff(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid == b.grid)) throw ShapeError("fields live on different grids");
  double best = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    best = std::max(best, std::abs(a.values[i] - b.values[i]));
  }
  return best;
}

}  // namespace cbvf
