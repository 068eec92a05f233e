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

#include "bess/program.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bess {

namespace {

bool SameBits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

template <typename Derived>
bool SameBits(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!SameBits(a(i, j), b(i, j))) return false;
    }
  }
  return true;
}

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const Segment* CanonicalProgram::FindVariables(const std::string& name) const {
  for (const auto& s : variables) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Segment* CanonicalProgram::FindRows(const std::string& name) const {
  for (const auto& s : rows) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void RequireConsistent(const CanonicalProgram& p) {
  const Eigen::Index n = p.lin.size();
  const Eigen::Index m = p.lower.size();
  if (p.quad.rows() != n || p.quad.cols() != n) {
    throw std::invalid_argument("quadratic cost must be n x n");
  }
  if (p.constraints.rows() != m || p.constraints.cols() != n) {
    throw std::invalid_argument("constraint matrix must be m x n");
  }
  if (p.upper.size() != m) {
    throw std::invalid_argument("lower and upper bounds differ in length");
  }
  if (!p.quad.allFinite() || !p.lin.allFinite() || !p.constraints.allFinite()) {
    throw std::invalid_argument("program data contains non-finite entries");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(p.lower[i]) || std::isnan(p.upper[i]) || p.lower[i] > p.upper[i]) {
      throw std::invalid_argument("constraint row " + std::to_string(i) +
                                  " has lower > upper");
    }
  }
  if (!p.quad.isApprox(p.quad.transpose(), 1e-12) && !p.quad.isZero(0.0)) {
    throw std::invalid_argument("quadratic cost must be symmetric");
  }
}

bool BitwiseEqual(const CanonicalProgram& a, const CanonicalProgram& b) {
  return SameBits(a.quad, b.quad) && SameBits(a.lin, b.lin) &&
         SameBits(a.constraints, b.constraints) && SameBits(a.lower, b.lower) &&
         SameBits(a.upper, b.upper) && a.variables == b.variables && a.rows == b.rows;
}

void WriteProgramDump(std::ostream& out, const CanonicalProgram& p) {
  const int n = p.num_variables();
  const int m = p.num_constraints();
  int nnz_a = 0, nnz_q = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) nnz_a += p.constraints(i, j) != 0.0;
    for (int i = 0; i <= j; ++i) nnz_q += p.quad(i, j) != 0.0;
  }
  out << n << ' ' << m << ' ' << nnz_a << ' ' << nnz_q << '\n';
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (p.constraints(i, j) != 0.0) {
        out << i << ' ' << j << ' ' << Num(p.constraints(i, j)) << '\n';
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (p.quad(i, j) != 0.0) out << i << ' ' << j << ' ' << Num(p.quad(i, j)) << '\n';
    }
  }
  for (int j = 0; j < n; ++j) out << Num(p.lin[j]) << '\n';
  for (int i = 0; i < m; ++i) out << Num(p.lower[i]) << ' ' << Num(p.upper[i]) << '\n';
}

}  // namespace bess
