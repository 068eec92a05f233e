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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "bess/discount.hpp"
#include "bess/domain.hpp"
#include "bess/marketdata.hpp"
#include "bess/solver.hpp"
#include "bess/timestamp.hpp"

namespace bess {

enum class MissingSnapshotPolicy { kFail, kForwardFill, kSkipZeroDispatch };

// "fail", "forward_fill", "skip_zero_dispatch".
std::string_view PolicyName(MissingSnapshotPolicy policy);
MissingSnapshotPolicy ParsePolicy(std::string_view name);

struct BacktestConfig {
  BatteryParams battery;
  DiscountSpec discount;
  double initial_soc = 0.1;
  Timestamp start;  // first decision interval
  Timestamp end;    // exclusive
  SolverSettings solver;
  MissingSnapshotPolicy missing_snapshot = MissingSnapshotPolicy::kFail;
};

// Throws std::invalid_argument on an empty or unaligned window, an initial SOC
// outside the bounds, or invalid battery/discount/solver settings.
void RequireValid(const BacktestConfig& config);

struct MarketData {
  SnapshotIndex forecasts;
  ActualPriceSeries actuals;
};

enum class StepStatus { kSolved, kMaxIterations, kInfeasible, kSkipped };
std::string_view StepStatusName(StepStatus status);

struct LedgerEntry {
  Timestamp interval_start;
  int t_k = 0;
  double power_mw = 0.0;  // executed
  double soc = 0.0;       // after execution
  double mean_price = 0.0;
  double revenue = 0.0;
  double objective = 0.0;  // plan objective, 0 when no plan was executed
  StepStatus status = StepStatus::kSkipped;

  // Diagnostics, not part of the ledger file.
  double soc_before = 0.0;
  double planned_power = 0.0;
  double plan_violation = 0.0;  // worst plan constraint violation
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool forward_filled = false;
};

struct Ledger {
  BatteryParams battery;
  double initial_soc = 0.0;
  std::vector<LedgerEntry> entries;
};

// Revenue of holding `power` for one interval of `dt` hours against the mean
// of the six 5-minute prices.
double settle(double power, std::span<const double> five_min_prices, double dt = 0.5);

struct ProfitTotal {
  double total = 0.0;
  std::size_t intervals = 0;
};

// Throws std::invalid_argument on an empty ledger.
ProfitTotal annual_profit(const Ledger& ledger);

// Receding-horizon simulation over [start, end). Throws DataError when a
// snapshot is missing under the fail policy or actual prices are missing.
Ledger run_backtest(const BacktestConfig& config, const MarketData& data);

struct BacktestSummary {
  double profit = 0.0;
  std::size_t intervals = 0;
  std::size_t solves = 0;
  std::size_t infeasible = 0;
  std::size_t max_iterations = 0;
  std::size_t skipped = 0;
  std::size_t forward_filled = 0;
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
  double max_plan_violation = 0.0;
  // Executed energy moved per trading day; informational, not constrained.
  double max_daily_throughput_mwh = 0.0;
};

BacktestSummary Summarize(const Ledger& ledger);

inline constexpr std::string_view kLedgerHeader =
    "interval_start,t_k,power_mw,soc,mean_price,revenue,objective,status";
void WriteLedgerCsv(std::ostream& out, const Ledger& ledger);

}  // namespace bess
