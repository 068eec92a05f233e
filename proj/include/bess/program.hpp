// Copyright 2026 The bess-arbitrage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bess {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Contiguous run of decision variables or constraint rows with a role name.
struct Segment {
  std::string name;
  int offset = 0;
  int size = 0;

  bool operator==(const Segment&) const = default;
};

// minimize 0.5 x'Qx + q'x  subject to  lower <= A x <= upper.
// Bounds may be +-infinity. Q must be symmetric positive semidefinite.
struct CanonicalProgram {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<Segment> variables;
  std::vector<Segment> rows;

  int num_variables() const { return static_cast<int>(lin.size()); }
  int num_constraints() const { return static_cast<int>(lower.size()); }

  const Segment* FindVariables(const std::string& name) const;
  const Segment* FindRows(const std::string& name) const;

  double Objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(quad * x) + lin.dot(x);
  }
};

// Throws std::invalid_argument on inconsistent dimensions, l > u, or NaN data.
void RequireConsistent(const CanonicalProgram& program);

// Exact equality of every matrix, vector and layout entry (bitwise on doubles,
// so -0.0 and 0.0 differ).
bool BitwiseEqual(const CanonicalProgram& a, const CanonicalProgram& b);

// Plain-text dump for offline inspection:
//   line 1: "<n> <m> <nnz_A> <nnz_Q>"
//   nnz_A lines "i j value" (A triplets, 0-based)
//   nnz_Q lines "i j value" (upper triangle of Q)
//   n lines "value" (linear cost)
//   m lines "lower upper"
// Values use %.17g; infinite bounds print as inf / -inf.
void WriteProgramDump(std::ostream& out, const CanonicalProgram& program);

}  // namespace bess
