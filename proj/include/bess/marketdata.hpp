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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bess/timestamp.hpp"

namespace bess {

// Which (report, table) to pull out of an AEMO C/I/D file and how to read it.
// AEMO stamps intervals by their end; target_offset_minutes shifts the parsed
// target time to the interval start (-30 for pre-dispatch periods, -5 for
// dispatch intervals). An empty run_time_column means the table carries no run
// time (actual prices).
struct AemoTableSpec {
  std::string report;
  std::string table;
  std::string region_column;
  std::string run_time_column;
  std::string target_time_column;
  std::string price_column;
  std::string timestamp_format = "%Y/%m/%d %H:%M:%S";
  int target_offset_minutes = 0;

  static AemoTableSpec ForecastDefaults();
  static AemoTableSpec ActualDefaults();
};

// Throws std::invalid_argument when names are empty or columns coincide.
void RequireValid(const AemoTableSpec& spec);

struct AemoRow {
  std::string region;
  std::optional<Timestamp> run_time;
  Timestamp target_time;  // interval start, offset applied
  double price = 0.0;
  int line = 0;

  bool operator==(const AemoRow& other) const {
    return region == other.region && run_time == other.run_time &&
           target_time == other.target_time && price == other.price;
  }
};

// Reads the C/I/D interchange layout. "C" lines are comments, "I" lines declare
// the columns of a (report, table) pair and "D" lines are data bound to the
// latest "I" for the same pair. Only rows of the requested table are returned.
// Throws FormatError naming `source` and the line (and field) on layout or
// value errors.
std::vector<AemoRow> parse_aemo_csv(std::istream& in, const AemoTableSpec& spec,
                                    const std::string& source = "<input>");
std::vector<AemoRow> parse_aemo_csv(std::string_view text, const AemoTableSpec& spec,
                                    const std::string& source = "<input>");

// Writes rows back as a minimal C/I/D document for `spec` (inverse of the
// parser, offset included).
void write_aemo_csv(std::ostream& out, const std::vector<AemoRow>& rows,
                    const AemoTableSpec& spec);

struct PricePoint {
  Timestamp time;
  double price = 0.0;

  bool operator==(const PricePoint&) const = default;
};

struct ForecastSnapshot {
  Timestamp run_time;
  std::string region;
  std::vector<PricePoint> entries;  // consecutive half-hours from run_time

  std::vector<double> Prices() const;
  bool operator==(const ForecastSnapshot&) const = default;
};

// Empty when the snapshot satisfies its invariants.
std::vector<std::string> SnapshotViolations(const ForecastSnapshot& snapshot);

class SnapshotIndex {
 public:
  // Throws std::invalid_argument on a repeated run time.
  void Insert(ForecastSnapshot snapshot);

  const ForecastSnapshot* Find(Timestamp run_time) const;
  // Latest snapshot whose run time is <= t.
  const ForecastSnapshot* LatestAtOrBefore(Timestamp t) const;

  std::size_t size() const { return by_run_.size(); }
  bool empty() const { return by_run_.empty(); }
  auto begin() const { return by_run_.begin(); }
  auto end() const { return by_run_.end(); }

  bool operator==(const SnapshotIndex&) const = default;

 private:
  std::map<Timestamp, ForecastSnapshot> by_run_;
};

struct ActualPriceSeries {
  std::string region;
  std::vector<PricePoint> entries;  // 5-minute interval starts, sorted

  // The six 5-minute prices of the half-hour starting at `start`, if covered.
  std::optional<std::array<double, kIntervalsPerHalfHour>> HalfHour(Timestamp start) const;
  std::optional<double> HalfHourMean(Timestamp start) const;

  bool operator==(const ActualPriceSeries&) const = default;
};

double MeanOfSix(const std::array<double, kIntervalsPerHalfHour>& prices);

enum class InvalidDataPolicy { kFail, kSkip };

struct LoadOptions {
  std::string region;  // empty: the data must hold a single region
  InvalidDataPolicy policy = InvalidDataPolicy::kFail;
};

struct ForecastLoad {
  SnapshotIndex index;
  std::size_t rows = 0;
  std::vector<std::string> diagnostics;  // skipped snapshots, deduplications
};

struct ActualLoad {
  ActualPriceSeries series;
  std::size_t rows = 0;
  std::vector<std::string> diagnostics;
};

// `path` may be a single file or a directory, whose files are visited in name
// order. Each file is either a normalized forecast CSV (detected by its header),
// a raw C/I/D report, or a single-file zip of either.
// Throws FormatError on malformed input, DataError on invariant violations under
// kFail, IoError on unreadable files.
ForecastLoad load_forecasts(const std::filesystem::path& path,
                            const AemoTableSpec& spec, const LoadOptions& options = {});
ForecastLoad ForecastsFromRows(const std::vector<AemoRow>& rows,
                               const LoadOptions& options = {});

// `path` may be a single file (normalized, raw or zip) or a directory of them.
ActualLoad load_actuals(const std::filesystem::path& path, const AemoTableSpec& spec,
                        const LoadOptions& options = {});
ActualLoad ActualsFromRows(const std::vector<AemoRow>& rows,
                           const LoadOptions& options = {});

inline constexpr std::string_view kForecastHeader = "run_time,target_time,region,price";
inline constexpr std::string_view kActualHeader = "interval_start,region,price";

void WriteNormalizedForecasts(std::ostream& out, const SnapshotIndex& index);
void WriteNormalizedActuals(std::ostream& out, const ActualPriceSeries& series);
std::vector<AemoRow> ReadNormalizedForecasts(std::istream& in, const std::string& source);
std::vector<AemoRow> ReadNormalizedActuals(std::istream& in, const std::string& source);

}  // namespace bess
