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
#include <vector>

#include "bess/marketdata.hpp"

namespace bess {

// Forecast accuracy at one lead time (lead 1 = the interval starting at the
// run time). Percentages are against the half-hour mean of actual 5-minute
// prices; targets whose actual mean is below kMinActualForPercent in magnitude
// are counted in `excluded` instead.
struct LeadErrorRow {
  int lead_time = 0;
  double mape_pct = 0.0;     // NaN when samples == 0
  double max_ape_pct = 0.0;  // NaN when samples == 0
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

inline constexpr double kMinActualForPercent = 1.0;

// One row per lead time from 1 to the longest lead with any overlap. Throws
// std::invalid_argument when no forecast target is covered by the actuals.
std::vector<LeadErrorRow> forecast_error_stats(const SnapshotIndex& snapshots,
                                               const ActualPriceSeries& actuals);

void WriteErrorStatsCsv(std::ostream& out, const std::vector<LeadErrorRow>& rows);

// Two whitespace-separated columns (lead_time value) for external plotting.
enum class ErrorStatistic { kMape, kMaxApe };
void WritePlotData(std::ostream& out, const std::vector<LeadErrorRow>& rows,
                   ErrorStatistic statistic);

}  // namespace bess
