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

#ifndef CBVF_ERROR_H_
#define CBVF_ERROR_H_

#include <stdexcept>
#include <string>

namespace cbvf {

// Base class for every error raised by the library. Subclasses name the
// failure category so callers (the CLI in particular) can map them to exit
// codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative r,
// control outside U, h(x0) <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Unknown builtin name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Mismatched grids or series.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Trajectory state norm exceeded the divergence ceiling.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// CFL time step fell below the stiffness floor.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

// Enumeration or storage guard exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Numeric overflow (unbounded alpha(r)/r, non-finite field values).
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Query point beyond the grid clamp tolerance.
class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration. `where` is a field path or "line N".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace cbvf

#endif  // CBVF_ERROR_H_
