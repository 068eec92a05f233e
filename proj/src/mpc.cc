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

#include "bess/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bess {

namespace {

// Constraint rows and variable layout shared by both objectives.
CanonicalProgram BuildConstraints(const MpcInstance& inst) {
  const int t = inst.horizon();
  const int n = 2 * t;
  const int m = 5 * t + 1;
  const BatteryParams& bp = inst.params;
  const double gain = bp.SocPerMw();

  CanonicalProgram prog;
  prog.quad = Eigen::MatrixXd::Zero(n, n);
  prog.lin = Eigen::VectorXd::Zero(n);
  prog.constraints = Eigen::MatrixXd::Zero(m, n);
  prog.lower.resize(m);
  prog.upper.resize(m);
  prog.variables = {{"power", 0, t}, {"abs_power", t, t}};
  prog.rows = {{"soc", 0, t},
               {"epigraph", t, 2 * t},
               {"throughput", 3 * t, 1},
               {"power_box", 3 * t + 1, t},
               {"abs_box", 4 * t + 1, t}};

  // soc_n = soc0 - gain * sum_{m<=n} P_m must stay inside the SOC band.
  for (int r = 0; r < t; ++r) {
    for (int j = 0; j <= r; ++j) prog.constraints(r, j) = gain;
    prog.lower[r] = inst.soc0 - bp.soc_upper;
    prog.upper[r] = inst.soc0 - bp.soc_lower;
  }
  for (int j = 0; j < t; ++j) {
    const int r_minus = t + 2 * j;  // u - P >= 0
    const int r_plus = r_minus + 1;  // u + P >= 0
    prog.constraints(r_minus, t + j) = 1.0;
    prog.constraints(r_minus, j) = -1.0;
    prog.constraints(r_plus, t + j) = 1.0;
    prog.constraints(r_plus, j) = 1.0;
    prog.lower[r_minus] = prog.lower[r_plus] = 0.0;
    prog.upper[r_minus] = prog.upper[r_plus] = kInfinity;
  }
  const int thr = 3 * t;
  for (int j = 0; j < t; ++j) prog.constraints(thr, t + j) = bp.dt;
  prog.lower[thr] = -kInfinity;
  prog.upper[thr] = ThroughputLimit(bp, t);

  const double abs_cap = std::max(-bp.p_lower, bp.p_upper);
  for (int j = 0; j < t; ++j) {
    const int rp = 3 * t + 1 + j;
    const int ru = 4 * t + 1 + j;
    prog.constraints(rp, j) = 1.0;
    prog.lower[rp] = bp.p_lower;
    prog.upper[rp] = bp.p_upper;
    prog.constraints(ru, t + j) = 1.0;
    prog.lower[ru] = 0.0;
    prog.upper[ru] = abs_cap;
  }
  return prog;
}

}  // namespace

void RequireValid(const MpcInstance& inst) {
  if (inst.prices.empty()) throw std::invalid_argument("MPC horizon is empty");
  if (inst.gamma.horizon() != inst.horizon()) {
    throw std::invalid_argument("gamma length " + std::to_string(inst.gamma.horizon()) +
                                " != horizon " + std::to_string(inst.horizon()));
  }
  for (double c : inst.prices) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite price forecast");
  }
  RequireValid(inst.params);
  RequireValid(inst.spec);
  for (double g : inst.gamma.values()) {
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("gamma weights must lie in (0, 1]");
  }
  if (!(inst.soc0 >= inst.params.soc_lower - kSocTolerance &&
        inst.soc0 <= inst.params.soc_upper + kSocTolerance)) {
    throw std::invalid_argument("initial SOC " + std::to_string(inst.soc0) +
                                " outside the SOC bounds");
  }
}

CanonicalProgram build_standard(const MpcInstance& inst) {
  RequireValid(inst);
  if (inst.spec.scheme != DiscountScheme::kNone) {
    throw std::invalid_argument("build_standard requires scheme 'none'");
  }
  CanonicalProgram prog = BuildConstraints(inst);
  for (int j = 0; j < inst.horizon(); ++j) prog.lin[j] = -inst.prices[j];
  return prog;
}

CanonicalProgram build_discounted(const MpcInstance& inst) {
  RequireValid(inst);
  const DiscountSpec spec = inst.spec.Normalized();
  const int t = inst.horizon();
  CanonicalProgram prog = BuildConstraints(inst);
  for (int j = 0; j < t; ++j) {
    const double g = inst.gamma[j];
    prog.lin[j] = -(inst.prices[j] * g);
    if (spec.norm_order == 1) {
      prog.lin[t + j] = spec.lambda / g;
    } else if (spec.lambda > 0.0) {
      prog.quad(j, j) = 2.0 * spec.lambda / (g * g);
    }
  }
  return prog;
}

std::string_view PlanStatusName(PlanStatus status) {
  switch (status) {
    case PlanStatus::kSolved: return "solved";
    case PlanStatus::kMaxIterations: return "max_iterations";
    case PlanStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

double plan_objective(const MpcInstance& inst, std::span<const double> powers) {
  const DiscountSpec spec = inst.spec.Normalized();
  double spread = 0.0;
  double penalty = 0.0;
  for (std::size_t j = 0; j < powers.size(); ++j) {
    const double g = inst.gamma[static_cast<int>(j)];
    spread += inst.prices[j] * g * powers[j];
    const double scaled = powers[j] / g;
    penalty += spec.norm_order == 1 ? std::abs(scaled) : scaled * scaled;
  }
  return spread - spec.lambda * penalty;
}

MpcPlan extract_plan(const MpcInstance& inst, const SolveResult& solution) {
  MpcPlan plan;
  switch (solution.status) {
    case SolveStatus::kSolved: plan.status = PlanStatus::kSolved; break;
    case SolveStatus::kMaxIterations: plan.status = PlanStatus::kMaxIterations; break;
    case SolveStatus::kPrimalInfeasible: plan.status = PlanStatus::kInfeasible; break;
  }
  if (plan.status == PlanStatus::kInfeasible) return plan;

  const int t = inst.horizon();
  if (solution.x.size() != 2 * t) {
    throw std::logic_error("solution has " + std::to_string(solution.x.size()) +
                           " variables, layout expects " + std::to_string(2 * t));
  }
  plan.powers.assign(solution.x.data(), solution.x.data() + t);
  plan.soc_path.reserve(static_cast<std::size_t>(t));
  double soc = inst.soc0;
  for (double p : plan.powers) {
    soc = soc_step(soc, p, inst.params);
    plan.soc_path.push_back(soc);
  }
  plan.objective = plan_objective(inst, plan.powers);
  return plan;
}

double MaxConstraintViolation(const MpcInstance& inst, std::span<const double> powers) {
  const BatteryParams& bp = inst.params;
  double worst = 0.0;
  double soc = inst.soc0;
  double moved = 0.0;
  for (double p : powers) {
    worst = std::max({worst, bp.p_lower - p, p - bp.p_upper});
    soc = soc_step(soc, p, bp);
    worst = std::max({worst, bp.soc_lower - soc, soc - bp.soc_upper});
    moved += std::abs(p) * bp.dt;
  }
  worst = std::max(worst, moved - ThroughputLimit(bp, static_cast<int>(powers.size())));
  return worst;
}

}  // namespace bess
