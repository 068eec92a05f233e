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

#include <string_view>

#include <Eigen/Dense>

#include "bess/program.hpp"

namespace bess {

struct SolverSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 20000;
  double rho = 0.1;
  bool adaptive_rho = true;
  double alpha = 1.6;
  double sigma = 1e-6;
  // Active-set refinement of the ADMM iterate. Besides the final refinement,
  // a refinement is attempted whenever the guessed active set is stable across
  // two termination checks, and periodically otherwise; an accepted refinement
  // ends the solve early.
  bool polish = true;
  int scaling_iterations = 10;
  int check_interval = 25;
  double eps_prim_inf = 1e-5;
};

// Throws std::invalid_argument on non-positive tolerances, max_iter < 1 or
// alpha outside [1, 2).
void RequireValid(const SolverSettings& settings);

enum class SolveStatus { kSolved, kMaxIterations, kPrimalInfeasible };
std::string_view StatusName(SolveStatus status);

struct SolveResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // > 0 where the upper bound binds, < 0 for the lower
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool polished = false;
};

// Operator-splitting (ADMM) solver for CanonicalProgram with Ruiz
// equilibration, adaptive penalty and active-set polishing. Residuals are
// reported in unscaled units. Deterministic for identical inputs.
//
// Throws std::invalid_argument on inconsistent dimensions or when Q is not
// positive semidefinite.
SolveResult solve(const CanonicalProgram& program,
                  const SolverSettings& settings = {});

struct KktReport {
  double primal_violation = 0.0;  // ||max(Ax-u,0) + max(l-Ax,0)||_inf
  double stationarity = 0.0;      // ||Qx + q + A'y||_inf
  double complementarity = 0.0;   // max_i |y_i| * distance of row i to its bound

  double Max() const;
};

KktReport kkt_residuals(const CanonicalProgram& program, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y);

}  // namespace bess
