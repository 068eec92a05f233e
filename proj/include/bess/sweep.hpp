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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bess/backtest.hpp"
#include "bess/discount.hpp"

namespace bess {

// Cartesian grid of discount hyperparameters. Points are enumerated by scheme,
// then norm order, then gamma0, then lambda, each in the listed order.
struct SweepGrid {
  std::vector<DiscountScheme> schemes;
  std::vector<int> norm_orders;
  std::vector<double> gamma0s;
  std::vector<double> lambdas;

  // Three schedules, s in {1, 2}, gamma0 in {0.95, 0.99}, lambda in {1, 0.5, 0}.
  static SweepGrid Default();
  std::vector<DiscountSpec> Points() const;
};

struct SweepRow {
  DiscountSpec spec;
  double annual_profit = 0.0;
  double uplift_pct = 0.0;
  bool baseline = false;
};

// Grid rows in grid order followed by the standard-MPC baseline row.
struct SweepResult {
  std::vector<SweepRow> rows;

  const SweepRow* Baseline() const;
};

// 100 * (profit - baseline) / |baseline|; NaN when the baseline is zero.
double UpliftPct(double profit, double baseline);

// Runs one backtest per grid point plus the baseline, on up to `jobs` threads.
// Results do not depend on `jobs`. Errors are rethrown with the grid point
// prepended, keeping their type.
SweepResult run_sweep(const BacktestConfig& base, const MarketData& data,
                      const SweepGrid& grid, int jobs = 1);

inline constexpr std::string_view kSweepHeader =
    "scheme,gamma0,lambda,s,annual_profit,uplift_pct";
void WriteSweepCsv(std::ostream& out, const SweepResult& result);

struct ComparisonReport {
  std::string table;    // console layout, '*' marks column maxima
  std::string summary;  // best grid point, or "no discounted rows"
  std::vector<bool> column_max;     // per result row
  std::optional<std::size_t> best;  // index into rows
};

// Columns are (gamma0, lambda) pairs and lines are (scheme, s) pairs, both in
// order of first appearance. Throws std::invalid_argument without a baseline.
ComparisonReport compare_report(const SweepResult& result);

std::string DescribePoint(const DiscountSpec& spec);

}  // namespace bess
