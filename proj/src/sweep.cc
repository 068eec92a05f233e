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

#include "bess/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "bess/csv.hpp"
#include "bess/errors.hpp"

namespace bess {

namespace {

std::string Compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <typename Error>
[[noreturn]] void Annotate(const std::string& label, const Error& e) {
  throw Error(label + ": " + e.what());
}

[[noreturn]] void RethrowAnnotated(std::exception_ptr error, const std::string& label) {
  try {
    std::rethrow_exception(error);
  } catch (const DataError& e) {
    Annotate(label, e);
  } catch (const FormatError& e) {
    Annotate(label, e);
  } catch (const IoError& e) {
    Annotate(label, e);
  } catch (const std::invalid_argument& e) {
    Annotate(label, e);
  } catch (const std::exception& e) {
    throw std::runtime_error(label + ": " + e.what());
  }
}

}  // namespace

SweepGrid SweepGrid::Default() {
  return {{DiscountScheme::kSimulatedAnneal, DiscountScheme::kCosineAnneal,
           DiscountScheme::kPowerLaw},
          {1, 2},
          {0.95, 0.99},
          {1.0, 0.5, 0.0}};
}

std::vector<DiscountSpec> SweepGrid::Points() const {
  std::vector<DiscountSpec> out;
  for (const auto scheme : schemes) {
    for (const int s : norm_orders) {
      for (const double g : gamma0s) {
        for (const double l : lambdas) out.push_back(DiscountSpec{scheme, g, l, s});
      }
    }
  }
  return out;
}

const SweepRow* SweepResult::Baseline() const {
  for (const auto& r : rows) {
    if (r.baseline) return &r;
  }
  return nullptr;
}

double UpliftPct(double profit, double baseline) {
  if (baseline == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 100.0 * (profit - baseline) / std::abs(baseline);
}

std::string DescribePoint(const DiscountSpec& spec) {
  return std::string(SchemeName(spec.scheme)) + " gamma0=" + Compact(spec.gamma0) +
         " lambda=" + Compact(spec.lambda) + " s=" + std::to_string(spec.norm_order);
}

SweepResult run_sweep(const BacktestConfig& base, const MarketData& data,
                      const SweepGrid& grid, int jobs) {
  std::vector<DiscountSpec> points = grid.Points();
  if (points.empty()) throw std::invalid_argument("sweep grid is empty");
  for (const auto& p : points) RequireValid(p);
  // The baseline is evaluated as one more task, after the grid points.
  points.push_back(DiscountSpec::Standard());

  std::vector<double> profits(points.size(), 0.0);
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        BacktestConfig config = base;
        config.discount = points[i];
        profits[i] = annual_profit(run_backtest(config, data)).total;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(points.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i]) continue;
    const bool is_baseline = i + 1 == points.size();
    RethrowAnnotated(errors[i], is_baseline ? "baseline" : DescribePoint(points[i]));
  }

  SweepResult result;
  const double baseline = profits.back();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    result.rows.push_back({points[i], profits[i], UpliftPct(profits[i], baseline), false});
  }
  result.rows.push_back({DiscountSpec::Standard(), baseline, 0.0, true});
  return result;
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << kSweepHeader << '\n';
  for (const auto& r : result.rows) {
    out << SchemeName(r.spec.scheme) << ',' << FormatFixed(r.spec.gamma0) << ','
        << FormatFixed(r.spec.lambda) << ',' << r.spec.norm_order << ','
        << FormatFixed(r.annual_profit) << ',' << FormatFixed(r.uplift_pct) << '\n';
  }
}

ComparisonReport compare_report(const SweepResult& result) {
  const SweepRow* baseline = result.Baseline();
  if (!baseline) throw std::invalid_argument("sweep has no baseline row");

  ComparisonReport report;
  report.column_max.assign(result.rows.size(), false);
  std::vector<std::pair<double, double>> columns;
  std::vector<std::pair<DiscountScheme, int>> lines;
  for (const auto& r : result.rows) {
    if (r.baseline) continue;
    const std::pair col{r.spec.gamma0, r.spec.lambda};
    const std::pair line{r.spec.scheme, r.spec.norm_order};
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    if (std::find(lines.begin(), lines.end(), line) == lines.end()) lines.push_back(line);
  }

  // Column maxima over discounted rows; ties are all marked.
  for (const auto& col : columns) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : result.rows) {
      if (!r.baseline && std::pair{r.spec.gamma0, r.spec.lambda} == col) {
        best = std::max(best, r.annual_profit);
      }
    }
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const auto& r = result.rows[i];
      if (!r.baseline && std::pair{r.spec.gamma0, r.spec.lambda} == col &&
          r.annual_profit == best) {
        report.column_max[i] = true;
      }
    }
  }
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    if (r.baseline) continue;
    if (!report.best || r.annual_profit > result.rows[*report.best].annual_profit) {
      report.best = i;
    }
  }

  std::ostringstream t;
  char cell[64];
  std::snprintf(cell, sizeof cell, "%-18s %2s", "scheme", "s");
  t << cell;
  for (const auto& [g, l] : columns) {
    const std::string head = "g0=" + Compact(g) + " l=" + Compact(l);
    std::snprintf(cell, sizeof cell, " %15s", head.c_str());
    t << cell;
  }
  t << '\n';
  for (const auto& [scheme, s] : lines) {
    std::snprintf(cell, sizeof cell, "%-18s %2d", std::string(SchemeName(scheme)).c_str(), s);
    t << cell;
    for (const auto& col : columns) {
      std::string text = "-";
      for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        if (!r.baseline && r.spec.scheme == scheme && r.spec.norm_order == s &&
            std::pair{r.spec.gamma0, r.spec.lambda} == col) {
          std::snprintf(cell, sizeof cell, "%.2f%s", r.annual_profit,
                        report.column_max[i] ? "*" : " ");
          text = cell;
        }
      }
      std::snprintf(cell, sizeof cell, " %15s", text.c_str());
      t << cell;
    }
    t << '\n';
  }
  std::snprintf(cell, sizeof cell, "%-21s %.2f\n", "standard", baseline->annual_profit);
  t << cell;
  report.table = t.str();

  if (!report.best) {
    report.summary = "no discounted rows";
  } else {
    const SweepRow& b = result.rows[*report.best];
    std::snprintf(cell, sizeof cell, "%.2f (uplift %.2f%%)", b.annual_profit, b.uplift_pct);
    report.summary = "best: " + DescribePoint(b.spec) + " profit " + cell;
  }
  return report;
}

}  // namespace bess
