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

#include "bess/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bess/csv.hpp"
#include "bess/errors.hpp"
#include "bess/mpc.hpp"

#include <spdlog/spdlog.h>

namespace bess {

namespace {

// The forecast prices for decision interval k, or empty when no usable
// snapshot exists under the policy.
std::vector<double> ForecastFrom(const ForecastSnapshot* snap, Timestamp k) {
  std::vector<double> prices;
  if (!snap) return prices;
  auto it = std::find_if(snap->entries.begin(), snap->entries.end(),
                         [&](const PricePoint& e) { return e.time >= k; });
  if (it == snap->entries.end() || it->time != k) return prices;
  for (; it != snap->entries.end(); ++it) prices.push_back(it->price);
  return prices;
}

StepStatus FromPlan(PlanStatus s) {
  switch (s) {
    case PlanStatus::kSolved: return StepStatus::kSolved;
    case PlanStatus::kMaxIterations: return StepStatus::kMaxIterations;
    case PlanStatus::kInfeasible: return StepStatus::kInfeasible;
  }
  return StepStatus::kInfeasible;
}

// Clips a planned power to what the battery can physically execute from soc,
// so tolerance-level plan violations never push the executed SOC out of bounds.
double Executable(double power, double soc, const BatteryParams& p) {
  const double g = p.SocPerMw();
  const double hi = std::min(p.p_upper, (soc - p.soc_lower) / g);
  const double lo = std::max(p.p_lower, (soc - p.soc_upper) / g);
  return std::clamp(power, std::min(lo, hi), hi);
}

}  // namespace

std::string_view PolicyName(MissingSnapshotPolicy policy) {
  switch (policy) {
    case MissingSnapshotPolicy::kFail: return "fail";
    case MissingSnapshotPolicy::kForwardFill: return "forward_fill";
    case MissingSnapshotPolicy::kSkipZeroDispatch: return "skip_zero_dispatch";
  }
  return "fail";
}

MissingSnapshotPolicy ParsePolicy(std::string_view name) {
  for (const auto p : {MissingSnapshotPolicy::kFail, MissingSnapshotPolicy::kForwardFill,
                       MissingSnapshotPolicy::kSkipZeroDispatch}) {
    if (PolicyName(p) == name) return p;
  }
  throw std::invalid_argument("unknown missing-snapshot policy '" + std::string(name) + "'");
}

void RequireValid(const BacktestConfig& c) {
  RequireValid(c.battery);
  RequireValid(c.discount);
  RequireValid(c.solver);
  if (!(c.start < c.end)) throw std::invalid_argument("backtest window is empty");
  if (!IsHalfHourAligned(c.start) || !IsHalfHourAligned(c.end)) {
    throw std::invalid_argument("backtest window must be half-hour aligned");
  }
  if (!(c.initial_soc >= c.battery.soc_lower && c.initial_soc <= c.battery.soc_upper)) {
    throw std::invalid_argument("initial soc lies outside the SOC bounds");
  }
}

std::string_view StepStatusName(StepStatus status) {
  switch (status) {
    case StepStatus::kSolved: return "solved";
    case StepStatus::kMaxIterations: return "max_iterations";
    case StepStatus::kInfeasible: return "infeasible";
    case StepStatus::kSkipped: return "skipped";
  }
  return "skipped";
}

double settle(double power, std::span<const double> five_min_prices, double dt) {
  if (five_min_prices.size() != kIntervalsPerHalfHour) {
    throw std::invalid_argument("settlement needs exactly 6 five-minute prices, got " +
                                std::to_string(five_min_prices.size()));
  }
  const double mean =
      std::accumulate(five_min_prices.begin(), five_min_prices.end(), 0.0) /
      kIntervalsPerHalfHour;
  return power * dt * mean;
}

ProfitTotal annual_profit(const Ledger& ledger) {
  if (ledger.entries.empty()) throw std::invalid_argument("ledger is empty");
  ProfitTotal out;
  for (const auto& e : ledger.entries) out.total += e.revenue;
  out.intervals = ledger.entries.size();
  return out;
}

Ledger run_backtest(const BacktestConfig& config, const MarketData& data) {
  RequireValid(config);
  const BatteryParams& params = config.battery;
  const DiscountSpec spec = config.discount.Normalized();
  GammaCache gammas;

  Ledger ledger;
  ledger.battery = params;
  ledger.initial_soc = config.initial_soc;
  double soc = config.initial_soc;

  for (Timestamp k = config.start; k < config.end; k = k.PlusMinutes(kHalfHourMinutes)) {
    LedgerEntry entry;
    entry.interval_start = k;
    entry.soc_before = soc;

    const auto six = data.actuals.HalfHour(k);
    if (!six) {
      throw DataError("no actual prices cover the half-hour starting " + FormatIso(k));
    }

    std::vector<double> prices = ForecastFrom(data.forecasts.Find(k), k);
    if (prices.empty()) {
      switch (config.missing_snapshot) {
        case MissingSnapshotPolicy::kFail:
          throw DataError("no forecast snapshot for run time " + FormatIso(k));
        case MissingSnapshotPolicy::kForwardFill:
          prices = ForecastFrom(data.forecasts.LatestAtOrBefore(k), k);
          if (prices.empty()) {
            throw DataError("no forecast snapshot at or before " + FormatIso(k) +
                            " covers that interval");
          }
          entry.forward_filled = true;
          break;
        case MissingSnapshotPolicy::kSkipZeroDispatch:
          break;
      }
    }

    double power = 0.0;
    if (!prices.empty()) {
      const int t_k = std::min(static_cast<int>(prices.size()), horizon_length(k));
      prices.resize(static_cast<std::size_t>(t_k));
      MpcInstance instance;
      instance.prices = std::move(prices);
      instance.gamma = *gammas.Get(spec, t_k);
      instance.spec = spec;
      instance.params = params;
      instance.soc0 = soc;
      const CanonicalProgram program = build_discounted(instance);
      const SolveResult result = solve(program, config.solver);
      const MpcPlan plan = extract_plan(instance, result);

      entry.t_k = t_k;
      entry.status = FromPlan(plan.status);
      entry.iterations = result.iterations;
      entry.primal_residual = result.primal_residual;
      entry.dual_residual = result.dual_residual;
      if (plan.status == PlanStatus::kSolved) {
        entry.planned_power = plan.powers.front();
        entry.objective = plan.objective;
        entry.plan_violation = MaxConstraintViolation(instance, plan.powers);
        power = Executable(entry.planned_power, soc, params);
      } else {
        spdlog::warn("{}: plan {} after {} iterations, executing zero dispatch", FormatIso(k),
                     PlanStatusName(plan.status), result.iterations);
      }
    } else {
      entry.t_k = horizon_length(k);
    }

    entry.power_mw = power;
    soc = soc_step(soc, power, params);
    entry.soc = soc;
    entry.mean_price = MeanOfSix(*six);
    entry.revenue = settle(power, *six, params.dt);
    ledger.entries.push_back(entry);
  }
  return ledger;
}

BacktestSummary Summarize(const Ledger& ledger) {
  BacktestSummary s;
  std::map<Timestamp, double> daily;
  for (const auto& e : ledger.entries) {
    s.profit += e.revenue;
    ++s.intervals;
    switch (e.status) {
      case StepStatus::kSolved: ++s.solves; break;
      case StepStatus::kMaxIterations: ++s.solves; ++s.max_iterations; break;
      case StepStatus::kInfeasible: ++s.solves; ++s.infeasible; break;
      case StepStatus::kSkipped: ++s.skipped; break;
    }
    if (e.forward_filled) ++s.forward_filled;
    s.max_primal_residual = std::max(s.max_primal_residual, e.primal_residual);
    s.max_dual_residual = std::max(s.max_dual_residual, e.dual_residual);
    s.max_plan_violation = std::max(s.max_plan_violation, e.plan_violation);
    daily[TradingDayStart(e.interval_start)] += std::abs(e.power_mw) * ledger.battery.dt;
  }
  for (const auto& [day, mwh] : daily) {
    s.max_daily_throughput_mwh = std::max(s.max_daily_throughput_mwh, mwh);
  }
  return s;
}

void WriteLedgerCsv(std::ostream& out, const Ledger& ledger) {
  out << kLedgerHeader << '\n';
  for (const auto& e : ledger.entries) {
    out << FormatIso(e.interval_start) << ',' << e.t_k << ',' << FormatFixed(e.power_mw) << ','
        << FormatFixed(e.soc) << ',' << FormatFixed(e.mean_price) << ','
        << FormatFixed(e.revenue) << ',' << FormatFixed(e.objective) << ','
        << StepStatusName(e.status) << '\n';
  }
}

}  // namespace bess
