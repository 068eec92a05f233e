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

#include "bess/error_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "bess/csv.hpp"

namespace bess {

std::vector<LeadErrorRow> forecast_error_stats(const SnapshotIndex& snapshots,
                                               const ActualPriceSeries& actuals) {
  struct Accumulator {
    double sum = 0.0, max = 0.0;
    std::size_t samples = 0, excluded = 0;
  };
  std::map<int, Accumulator> by_lead;
  std::map<Timestamp, std::optional<double>> means;
  const auto mean_of = [&](Timestamp t) {
    auto it = means.find(t);
    if (it == means.end()) it = means.emplace(t, actuals.HalfHourMean(t)).first;
    return it->second;
  };

  for (const auto& [run, snap] : snapshots) {
    for (const auto& entry : snap.entries) {
      const auto actual = mean_of(entry.time);
      if (!actual) continue;
      const int lead = static_cast<int>(entry.time.MinutesSince(run) / kHalfHourMinutes) + 1;
      Accumulator& acc = by_lead[lead];
      if (std::abs(*actual) < kMinActualForPercent) {
        ++acc.excluded;
        continue;
      }
      const double ape = 100.0 * std::abs(entry.price - *actual) / std::abs(*actual);
      acc.sum += ape;
      acc.max = std::max(acc.max, ape);
      ++acc.samples;
    }
  }
  if (by_lead.empty()) {
    throw std::invalid_argument("forecasts and actual prices do not overlap");
  }

  std::vector<LeadErrorRow> rows;
  const int longest = by_lead.rbegin()->first;
  for (int lead = 1; lead <= longest; ++lead) {
    LeadErrorRow row;
    row.lead_time = lead;
    const auto it = by_lead.find(lead);
    if (it != by_lead.end()) {
      row.samples = it->second.samples;
      row.excluded = it->second.excluded;
    }
    if (row.samples == 0) {
      row.mape_pct = row.max_ape_pct = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.mape_pct = it->second.sum / static_cast<double>(row.samples);
      row.max_ape_pct = it->second.max;
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteErrorStatsCsv(std::ostream& out, const std::vector<LeadErrorRow>& rows) {
  out << "lead_time,mape_pct,max_ape_pct,samples,excluded\n";
  for (const auto& r : rows) {
    out << r.lead_time << ',' << FormatFixed(r.mape_pct) << ',' << FormatFixed(r.max_ape_pct)
        << ',' << r.samples << ',' << r.excluded << '\n';
  }
}

void WritePlotData(std::ostream& out, const std::vector<LeadErrorRow>& rows,
                   ErrorStatistic statistic) {
  out << "# lead_time " << (statistic == ErrorStatistic::kMape ? "mape_pct" : "max_ape_pct")
      << '\n';
  for (const auto& r : rows) {
    if (r.samples == 0) continue;
    out << r.lead_time << ' '
        << FormatFixed(statistic == ErrorStatistic::kMape ? r.mape_pct : r.max_ape_pct) << '\n';
  }
}

}  // namespace bess
