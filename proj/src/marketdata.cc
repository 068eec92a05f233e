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

#include "bess/marketdata.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bess/csv.hpp"
#include "bess/errors.hpp"
#include "bess/zip_reader.hpp"

namespace bess {

namespace {

std::string Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

struct TableKey {
  std::string report, table;
  auto operator<=>(const TableKey&) const = default;
};

struct Projection {
  int region = -1, run_time = -1, target_time = -1, price = -1;
  std::size_t width = 0;
};

int FindColumn(const std::vector<std::string>& cols, const std::string& name) {
  const auto it = std::find(cols.begin(), cols.end(), name);
  return it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
}

// Header fields start after "I,report,table,version".
constexpr std::size_t kFirstColumn = 4;

Timestamp ParseField(const std::vector<std::string>& f, int idx, const AemoTableSpec& spec,
                     const std::string& source, int line) {
  const std::size_t at = kFirstColumn + static_cast<std::size_t>(idx);
  const auto t = ParseTimestamp(Trim(f[at]), spec.timestamp_format);
  if (!t) {
    throw FormatError(source, line, static_cast<int>(at) + 1,
                      "unparseable timestamp '" + f[at] + "'");
  }
  return *t;
}

std::string JoinRegions(const std::set<std::string>& regions) {
  std::string out;
  for (const auto& r : regions) out += (out.empty() ? "" : ", ") + r;
  return out;
}

// Rows restricted to one region; with no explicit choice the data must hold
// exactly one.
std::vector<const AemoRow*> SelectRegion(const std::vector<AemoRow>& rows,
                                         const LoadOptions& options) {
  std::vector<const AemoRow*> out;
  if (!options.region.empty()) {
    for (const auto& r : rows) {
      if (r.region == options.region) out.push_back(&r);
    }
    return out;
  }
  std::set<std::string> regions;
  for (const auto& r : rows) regions.insert(r.region);
  if (regions.size() > 1) {
    throw DataError("data holds several regions (" + JoinRegions(regions) +
                    "); select one");
  }
  for (const auto& r : rows) out.push_back(&r);
  return out;
}

void Violation(const LoadOptions& options, std::vector<std::string>& diagnostics,
               const std::string& message) {
  if (options.policy == InvalidDataPolicy::kFail) throw DataError(message);
  diagnostics.push_back("skipped: " + message);
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError(path.string() + ": read failed");
  if (LooksLikeZip(bytes)) return ReadSingleFileZip(path);
  return bytes;
}

std::string_view FirstLine(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  text = text.substr(0, text.find('\n'));
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  return text;
}

std::vector<std::filesystem::path> DataFiles(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return {path};
  if (!std::filesystem::is_directory(path, ec)) {
    throw IoError(path.string() + ": no such file or directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".csv" || ext == ".zip") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<AemoRow> ReadRows(const std::filesystem::path& path, const AemoTableSpec& spec,
                              std::string_view normalized_header, bool forecasts) {
  const std::string text = ReadFileBytes(path);
  if (FirstLine(text) == normalized_header) {
    std::istringstream in(text);
    return forecasts ? ReadNormalizedForecasts(in, path.string())
                     : ReadNormalizedActuals(in, path.string());
  }
  return parse_aemo_csv(std::string_view(text), spec, path.string());
}

}  // namespace

AemoTableSpec AemoTableSpec::ForecastDefaults() {
  AemoTableSpec s;
  s.report = "PREDISPATCH";
  s.table = "REGION_PRICES";
  s.region_column = "REGIONID";
  s.run_time_column = "PREDISPATCH_RUN_DATETIME";
  s.target_time_column = "DATETIME";
  s.price_column = "RRP";
  s.target_offset_minutes = -kHalfHourMinutes;
  return s;
}

AemoTableSpec AemoTableSpec::ActualDefaults() {
  AemoTableSpec s;
  s.report = "DISPATCH";
  s.table = "PRICE";
  s.region_column = "REGIONID";
  s.target_time_column = "SETTLEMENTDATE";
  s.price_column = "RRP";
  s.target_offset_minutes = -kFiveMinutes;
  return s;
}

void RequireValid(const AemoTableSpec& spec) {
  if (spec.report.empty() || spec.table.empty()) {
    throw std::invalid_argument("table spec needs a report and table name");
  }
  if (spec.region_column.empty() || spec.target_time_column.empty() ||
      spec.price_column.empty()) {
    throw std::invalid_argument("table spec needs region, target time and price columns");
  }
  if (spec.timestamp_format.empty()) {
    throw std::invalid_argument("table spec needs a timestamp format");
  }
  std::set<std::string> names{spec.region_column, spec.target_time_column, spec.price_column};
  std::size_t expected = 3;
  if (!spec.run_time_column.empty()) {
    names.insert(spec.run_time_column);
    ++expected;
  }
  if (names.size() != expected) {
    throw std::invalid_argument("table spec column names must be distinct");
  }
}

std::vector<AemoRow> parse_aemo_csv(std::istream& in, const AemoTableSpec& spec,
                                    const std::string& source) {
  RequireValid(spec);
  const TableKey wanted{spec.report, spec.table};
  std::map<TableKey, std::size_t> widths;
  std::optional<Projection> proj;
  std::vector<AemoRow> rows;
  std::vector<std::string> f;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!SplitCsvLine(line, f)) throw FormatError(source, line_no, 0, "unterminated quote");
    const std::string kind = Trim(f[0]);
    if (kind == "C") continue;
    if (kind != "I" && kind != "D") {
      throw FormatError(source, line_no, 1, "unknown record type '" + f[0] + "'");
    }
    if (f.size() < kFirstColumn) {
      throw FormatError(source, line_no, 0,
                        "record needs type, report, table and version fields");
    }
    const TableKey key{Trim(f[1]), Trim(f[2])};

    if (kind == "I") {
      std::vector<std::string> cols;
      for (std::size_t i = kFirstColumn; i < f.size(); ++i) cols.push_back(Trim(f[i]));
      widths[key] = cols.size();
      if (key != wanted) continue;
      Projection p;
      p.width = cols.size();
      p.region = FindColumn(cols, spec.region_column);
      p.target_time = FindColumn(cols, spec.target_time_column);
      p.price = FindColumn(cols, spec.price_column);
      if (!spec.run_time_column.empty()) p.run_time = FindColumn(cols, spec.run_time_column);
      for (const auto& [idx, name] :
           {std::pair{p.region, spec.region_column}, {p.target_time, spec.target_time_column},
            {p.price, spec.price_column}}) {
        if (idx < 0) {
          throw FormatError(source, line_no, 0, "header lacks column " + name);
        }
      }
      if (!spec.run_time_column.empty() && p.run_time < 0) {
        throw FormatError(source, line_no, 0, "header lacks column " + spec.run_time_column);
      }
      proj = p;
      continue;
    }

    const auto width = widths.find(key);
    if (width == widths.end()) {
      throw FormatError(source, line_no, 0,
                        "data record for " + key.report + "/" + key.table +
                            " before its header record");
    }
    if (f.size() - kFirstColumn != width->second) {
      throw FormatError(source, line_no, 0,
                        "data record has " + std::to_string(f.size() - kFirstColumn) +
                            " fields, header declares " + std::to_string(width->second));
    }
    if (key != wanted) continue;

    AemoRow row;
    row.line = line_no;
    row.region = Trim(f[kFirstColumn + static_cast<std::size_t>(proj->region)]);
    row.target_time = ParseField(f, proj->target_time, spec, source, line_no)
                          .PlusMinutes(spec.target_offset_minutes);
    if (proj->run_time >= 0) row.run_time = ParseField(f, proj->run_time, spec, source, line_no);
    const std::size_t price_at = kFirstColumn + static_cast<std::size_t>(proj->price);
    if (!ParseDouble(f[price_at], row.price)) {
      throw FormatError(source, line_no, static_cast<int>(price_at) + 1,
                        "unparseable price '" + f[price_at] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError(source + ": read failed");
  return rows;
}

std::vector<AemoRow> parse_aemo_csv(std::string_view text, const AemoTableSpec& spec,
                                    const std::string& source) {
  std::istringstream in{std::string(text)};
  return parse_aemo_csv(in, spec, source);
}

void write_aemo_csv(std::ostream& out, const std::vector<AemoRow>& rows,
                    const AemoTableSpec& spec) {
  RequireValid(spec);
  const bool with_run = !spec.run_time_column.empty();
  std::vector<std::string> header{"I", spec.report, spec.table, "1", spec.region_column};
  if (with_run) header.push_back(spec.run_time_column);
  header.push_back(spec.target_time_column);
  header.push_back(spec.price_column);
  out << "C,NORMALIZED EXPORT\n" << JoinCsv(header) << '\n';
  for (const auto& r : rows) {
    std::vector<std::string> f{"D", spec.report, spec.table, "1", r.region};
    if (with_run) {
      f.push_back(r.run_time ? FormatTimestamp(*r.run_time, spec.timestamp_format) : "");
    }
    f.push_back(FormatTimestamp(r.target_time.PlusMinutes(-spec.target_offset_minutes),
                                spec.timestamp_format));
    f.push_back(FormatExact(r.price));
    out << JoinCsv(f) << '\n';
  }
  out << "C,END OF REPORT," << rows.size() + 3 << '\n';
}

std::vector<double> ForecastSnapshot::Prices() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.price);
  return out;
}

std::vector<std::string> SnapshotViolations(const ForecastSnapshot& s) {
  std::vector<std::string> out;
  const std::string run = FormatIso(s.run_time);
  if (!IsHalfHourAligned(s.run_time)) out.push_back("run " + run + " not half-hour aligned");
  if (s.entries.empty()) {
    out.push_back("run " + run + " has no entries");
    return out;
  }
  if (s.entries.size() > static_cast<std::size_t>(kMaxHorizon)) {
    out.push_back("run " + run + " has " + std::to_string(s.entries.size()) +
                  " entries, more than " + std::to_string(kMaxHorizon));
  }
  if (s.entries.front().time < s.run_time) {
    out.push_back("run " + run + " has target " + FormatIso(s.entries.front().time) +
                  " before its run time");
  }
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const Timestamp t = s.entries[i].time;
    if (!IsHalfHourAligned(t)) {
      out.push_back("run " + run + " target " + FormatIso(t) + " not half-hour aligned");
    }
    if (i > 0 && t.MinutesSince(s.entries[i - 1].time) != kHalfHourMinutes) {
      out.push_back("run " + run + " has a gap or disorder before " + FormatIso(t));
    }
  }
  return out;
}

void SnapshotIndex::Insert(ForecastSnapshot snapshot) {
  const Timestamp key = snapshot.run_time;
  if (!by_run_.emplace(key, std::move(snapshot)).second) {
    throw std::invalid_argument("duplicate snapshot for run " + FormatIso(key));
  }
}

const ForecastSnapshot* SnapshotIndex::Find(Timestamp run_time) const {
  const auto it = by_run_.find(run_time);
  return it == by_run_.end() ? nullptr : &it->second;
}

const ForecastSnapshot* SnapshotIndex::LatestAtOrBefore(Timestamp t) const {
  auto it = by_run_.upper_bound(t);
  if (it == by_run_.begin()) return nullptr;
  return &std::prev(it)->second;
}

std::optional<std::array<double, kIntervalsPerHalfHour>> ActualPriceSeries::HalfHour(
    Timestamp start) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), start,
                             [](const PricePoint& p, Timestamp t) { return p.time < t; });
  std::array<double, kIntervalsPerHalfHour> out{};
  for (int j = 0; j < kIntervalsPerHalfHour; ++j, ++it) {
    if (it == entries.end() || it->time != start.PlusMinutes(j * kFiveMinutes)) {
      return std::nullopt;
    }
    out[static_cast<std::size_t>(j)] = it->price;
  }
  return out;
}

std::optional<double> ActualPriceSeries::HalfHourMean(Timestamp start) const {
  const auto six = HalfHour(start);
  if (!six) return std::nullopt;
  return MeanOfSix(*six);
}

double MeanOfSix(const std::array<double, kIntervalsPerHalfHour>& prices) {
  return std::accumulate(prices.begin(), prices.end(), 0.0) / kIntervalsPerHalfHour;
}

ForecastLoad ForecastsFromRows(const std::vector<AemoRow>& rows, const LoadOptions& options) {
  ForecastLoad load;
  std::map<Timestamp, std::vector<const AemoRow*>> by_run;
  for (const AemoRow* r : SelectRegion(rows, options)) {
    if (!r->run_time) throw DataError("forecast row without a run time");
    by_run[*r->run_time].push_back(r);
    ++load.rows;
  }
  for (auto& [run, group] : by_run) {
    std::stable_sort(group.begin(), group.end(), [](const AemoRow* a, const AemoRow* b) {
      return a->target_time < b->target_time;
    });
    ForecastSnapshot snap;
    snap.run_time = run;
    snap.region = group.front()->region;
    std::vector<std::string> problems;
    for (const AemoRow* r : group) {
      if (!snap.entries.empty() && snap.entries.back().time == r->target_time) {
        if (snap.entries.back().price == r->price) {
          load.diagnostics.push_back("run " + FormatIso(run) + ": duplicate target " +
                                     FormatIso(r->target_time) + " deduplicated");
        } else {
          problems.push_back("run " + FormatIso(run) + " has conflicting prices for target " +
                             FormatIso(r->target_time));
        }
        continue;
      }
      snap.entries.push_back({r->target_time, r->price});
    }
    auto more = SnapshotViolations(snap);
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) {
      Violation(options, load.diagnostics, problems.front());
      continue;
    }
    load.index.Insert(std::move(snap));
  }
  return load;
}

ActualLoad ActualsFromRows(const std::vector<AemoRow>& rows, const LoadOptions& options) {
  ActualLoad load;
  std::vector<const AemoRow*> sel = SelectRegion(rows, options);
  load.rows = sel.size();
  std::stable_sort(sel.begin(), sel.end(), [](const AemoRow* a, const AemoRow* b) {
    return a->target_time < b->target_time;
  });
  if (!sel.empty()) load.series.region = sel.front()->region;

  std::map<Timestamp, std::vector<PricePoint>> by_half_hour;
  for (const AemoRow* r : sel) {
    if (!IsFiveMinuteAligned(r->target_time)) {
      Violation(options, load.diagnostics,
                "interval " + FormatIso(r->target_time) + " is not 5-minute aligned");
      continue;
    }
    const Timestamp half = FloorHalfHour(r->target_time);
    auto& group = by_half_hour[half];
    if (!group.empty() && group.back().time == r->target_time) {
      if (group.back().price == r->price) {
        load.diagnostics.push_back("interval " + FormatIso(r->target_time) +
                                   " duplicate deduplicated");
      } else {
        Violation(options, load.diagnostics,
                  "interval " + FormatIso(r->target_time) + " has conflicting prices");
        group.clear();
      }
      continue;
    }
    group.push_back({r->target_time, r->price});
  }
  for (auto& [half, group] : by_half_hour) {
    if (group.size() != kIntervalsPerHalfHour) {
      std::string missing;
      for (int j = 0; j < kIntervalsPerHalfHour; ++j) {
        const Timestamp t = half.PlusMinutes(j * kFiveMinutes);
        if (std::none_of(group.begin(), group.end(),
                         [&](const PricePoint& p) { return p.time == t; })) {
          missing += (missing.empty() ? "" : ", ") + FormatIso(t);
        }
      }
      Violation(options, load.diagnostics,
                "half-hour " + FormatIso(half) + " is missing 5-minute interval(s) " + missing);
      continue;
    }
    load.series.entries.insert(load.series.entries.end(), group.begin(), group.end());
  }
  return load;
}

ForecastLoad load_forecasts(const std::filesystem::path& path,
                            const AemoTableSpec& spec, const LoadOptions& options) {
  RequireValid(spec);
  if (spec.run_time_column.empty()) {
    throw std::invalid_argument("forecast table spec needs a run time column");
  }
  std::vector<AemoRow> rows;
  for (const auto& file : DataFiles(path)) {
    auto part = ReadRows(file, spec, kForecastHeader, true);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return ForecastsFromRows(rows, options);
}

ActualLoad load_actuals(const std::filesystem::path& path, const AemoTableSpec& spec,
                        const LoadOptions& options) {
  RequireValid(spec);
  std::vector<AemoRow> rows;
  for (const auto& file : DataFiles(path)) {
    auto part = ReadRows(file, spec, kActualHeader, false);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return ActualsFromRows(rows, options);
}

void WriteNormalizedForecasts(std::ostream& out, const SnapshotIndex& index) {
  out << kForecastHeader << '\n';
  for (const auto& [run, snap] : index) {
    const std::string run_text = FormatIso(run);
    for (const auto& e : snap.entries) {
      out << run_text << ',' << FormatIso(e.time) << ',' << QuoteCsvField(snap.region) << ','
          << FormatExact(e.price) << '\n';
    }
  }
}

void WriteNormalizedActuals(std::ostream& out, const ActualPriceSeries& series) {
  out << kActualHeader << '\n';
  for (const auto& e : series.entries) {
    out << FormatIso(e.time) << ',' << QuoteCsvField(series.region) << ','
        << FormatExact(e.price) << '\n';
  }
}

namespace {

std::vector<AemoRow> ReadNormalized(std::istream& in, const std::string& source,
                                    std::string_view header, bool with_run) {
  std::vector<AemoRow> rows;
  std::vector<std::string> f;
  std::string line;
  int line_no = 0;
  const std::size_t width = with_run ? 4 : 3;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (FirstLine(line) != header) {
        throw FormatError(source, 1, 0, "expected header '" + std::string(header) + "'");
      }
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!SplitCsvLine(line, f)) throw FormatError(source, line_no, 0, "unterminated quote");
    if (f.size() != width) {
      throw FormatError(source, line_no, 0,
                        "expected " + std::to_string(width) + " fields, found " +
                            std::to_string(f.size()));
    }
    AemoRow row;
    row.line = line_no;
    std::size_t col = 0;
    if (with_run) {
      row.run_time = ParseIso(f[0]);
      if (!row.run_time) throw FormatError(source, line_no, 1, "bad timestamp '" + f[0] + "'");
      ++col;
    }
    const auto target = ParseIso(f[col]);
    if (!target) {
      throw FormatError(source, line_no, static_cast<int>(col) + 1,
                        "bad timestamp '" + f[col] + "'");
    }
    row.target_time = *target;
    row.region = f[col + 1];
    if (!ParseDouble(f[col + 2], row.price)) {
      throw FormatError(source, line_no, static_cast<int>(col) + 3,
                        "bad price '" + f[col + 2] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw FormatError(source, 1, 0, "empty file, expected a header");
  return rows;
}

}  // namespace

std::vector<AemoRow> ReadNormalizedForecasts(std::istream& in, const std::string& source) {
  return ReadNormalized(in, source, kForecastHeader, true);
}

std::vector<AemoRow> ReadNormalizedActuals(std::istream& in, const std::string& source) {
  return ReadNormalized(in, source, kActualHeader, false);
}

}  // namespace bess
