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

#include <span>
#include <string_view>
#include <vector>

#include "bess/discount.hpp"
#include "bess/domain.hpp"
#include "bess/program.hpp"
#include "bess/solver.hpp"

namespace bess {

// One receding-horizon decision problem: price forecasts over the horizon,
// lead-time weights, battery limits and the starting SOC.
struct MpcInstance {
  std::vector<double> prices;  // $/MWh, lead 1 first
  GammaVector gamma;
  DiscountSpec spec;
  BatteryParams params;
  double soc0 = 0.0;

  int horizon() const { return static_cast<int>(prices.size()); }
};

// SOC tolerance for soc0 so executed trajectories that touch a bound through
// rounding still form valid instances.
inline constexpr double kSocTolerance = 1e-9;

// Throws std::invalid_argument when lengths disagree, the horizon is empty,
// params/spec are invalid or soc0 lies outside the SOC bounds.
void RequireValid(const MpcInstance& instance);

// Variable segments "power" (P_1..P_T) and "abs_power" (u_1..u_T). Row segments,
// in order: "soc" (T cumulative-energy rows), "epigraph" (2T rows u -/+ P >= 0),
// "throughput" (1 row), "power_box" (T), "abs_box" (T).
CanonicalProgram build_standard(const MpcInstance& instance);

// Weighted spread minus lambda * ||P / gamma||_s. For s = 1 the penalty is
// carried by the abs_power costs lambda / gamma_n; for s = 2 it is the squared
// norm, Q_nn = 2 lambda / gamma_n^2.
CanonicalProgram build_discounted(const MpcInstance& instance);

enum class PlanStatus { kSolved, kMaxIterations, kInfeasible };
std::string_view PlanStatusName(PlanStatus status);

struct MpcPlan {
  std::vector<double> powers;    // MW
  std::vector<double> soc_path;  // SOC after each interval
  double objective = 0.0;        // maximization sense, recomputed from powers
  PlanStatus status = PlanStatus::kInfeasible;
};

// Discounted objective c'GammaP - lambda*R(P) evaluated directly from powers.
double plan_objective(const MpcInstance& instance, std::span<const double> powers);

// Throws std::logic_error when the solution does not match the program layout.
MpcPlan extract_plan(const MpcInstance& instance, const SolveResult& solution);

// Largest violation, in natural units, of the SOC bounds, power box and
// throughput limit implied by the plan's powers (absolute values used for the
// throughput row).
double MaxConstraintViolation(const MpcInstance& instance,
                              std::span<const double> powers);

// Throughput allowance over a horizon of t_k intervals, MWh.
inline double ThroughputLimit(const BatteryParams& params, int horizon) {
  return static_cast<double>(horizon) / 48.0 * params.e_nom;
}

}  // namespace bess
