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

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "bess/backtest.hpp"
#include "bess/errors.hpp"
#include "bess/mpc.hpp"
#include "bess/synth.hpp"
#include "oracles.hpp"

using bess::DiscountScheme;
using bess::DiscountSpec;
using bess::Timestamp;

namespace {

struct Market {
  bess::SynthConfig synth;
  bess::MarketData data;
};

Market Synthetic(int days, std::uint64_t seed, double noise = 0.01) {
  Market m;
  m.synth.days = days;
  m.synth.seed = seed;
  m.synth.noise_scale = noise;
  auto d = bess::synth_generate(m.synth);
  m.data.forecasts = std::move(d.forecasts);
  m.data.actuals = std::move(d.actuals);
  return m;
}

bess::BacktestConfig Window(const bess::SynthConfig& synth, int intervals,
                            const DiscountSpec& spec = {}) {
  bess::BacktestConfig c;
  c.discount = spec;
  c.start = synth.start;
  c.end = synth.start.PlusMinutes(30 * intervals);
  return c;
}

std::string LedgerText(const bess::Ledger& ledger) {
  std::ostringstream out;
  bess::WriteLedgerCsv(out, ledger);
  return out.str();
}

// SOC chaining, bounds and settlement of every executed step.
void CheckPhysics(const bess::Ledger& ledger) {
  const auto& b = ledger.battery;
  double soc = ledger.initial_soc;
  for (const auto& e : ledger.entries) {
    CHECK(e.soc_before == soc);
    CHECK(e.soc == bess::soc_step(soc, e.power_mw, b));
    CHECK(e.soc >= b.soc_lower - 1e-9);
    CHECK(e.soc <= b.soc_upper + 1e-9);
    CHECK(e.plan_violation <= 1e-6);
    CHECK(e.power_mw >= b.p_lower);
    CHECK(e.power_mw <= b.p_upper);
    CHECK(std::abs(e.revenue - e.power_mw * b.dt * e.mean_price) <=
          1e-9 * (1.0 + std::abs(e.revenue)));
    soc = e.soc;
  }
}

}  // namespace

TEST_SUITE("backtest") {

TEST_CASE("settlement examples") {
  const std::array<double, 6> hundred{100, 100, 100, 100, 100, 100};
  CHECK(bess::settle(1.1, hundred) == doctest::Approx(55.0));
  CHECK(bess::settle(0.0, hundred) == 0.0);
  const std::array<double, 6> forty{10, 70, 40, 40, 20, 60};
  CHECK(bess::settle(-1.1, forty) == doctest::Approx(-22.0));
  const std::vector<double> five{1, 2, 3, 4, 5};
  CHECK_THROWS_AS(bess::settle(1.0, five), std::invalid_argument);
}

TEST_CASE("annual profit sums revenues") {
  bess::Ledger ledger;
  CHECK_THROWS_AS(bess::annual_profit(ledger), std::invalid_argument);
  ledger.entries.resize(1);
  ledger.entries[0].revenue = 55.0;
  CHECK(bess::annual_profit(ledger).total == 55.0);
  ledger.entries.resize(2);
  ledger.entries[1].revenue = -22.0;
  const auto p = bess::annual_profit(ledger);
  CHECK(p.total == 33.0);
  CHECK(p.intervals == 2);
}

TEST_CASE("policy names") {
  for (const auto p : {bess::MissingSnapshotPolicy::kFail, bess::MissingSnapshotPolicy::kForwardFill,
                       bess::MissingSnapshotPolicy::kSkipZeroDispatch}) {
    CHECK(bess::ParsePolicy(bess::PolicyName(p)) == p);
  }
  CHECK_THROWS_AS(bess::ParsePolicy("pad"), std::invalid_argument);
}

TEST_CASE("configuration validation") {
  const auto m = Synthetic(1, 1);
  auto c = Window(m.synth, 4);
  CHECK_NOTHROW(bess::RequireValid(c));
  c.end = c.start;
  CHECK_THROWS_AS(bess::RequireValid(c), std::invalid_argument);
  c = Window(m.synth, 4);
  c.start = c.start.PlusMinutes(5);
  CHECK_THROWS_AS(bess::RequireValid(c), std::invalid_argument);
  c = Window(m.synth, 4);
  c.initial_soc = 0.05;
  CHECK_THROWS_AS(bess::RequireValid(c), std::invalid_argument);
  c = Window(m.synth, 4);
  c.discount.gamma0 = 0.0;
  CHECK_THROWS_AS(bess::run_backtest(c, m.data), std::invalid_argument);
}

TEST_CASE("single-step window") {
  const auto m = Synthetic(2, 3);
  for (int offset : {0, 16, 17}) {
    auto c = Window(m.synth, 1);
    c.start = c.start.PlusMinutes(30 * offset);
    c.end = c.start.PlusMinutes(30);
    const auto ledger = bess::run_backtest(c, m.data);
    REQUIRE(ledger.entries.size() == 1);
    CHECK(ledger.entries[0].t_k == bess::horizon_length(c.start));
    CHECK(ledger.entries[0].status == bess::StepStatus::kSolved);
  }
}

TEST_CASE("ledger physics across schemes") {
  const auto m = Synthetic(3, 5);
  const DiscountSpec specs[] = {
      {},
      {DiscountScheme::kPowerLaw, 0.95, 1.0, 1},
      {DiscountScheme::kSimulatedAnneal, 0.99, 0.5, 2},
      {DiscountScheme::kCosineAnneal, 0.95, 0.0, 1},
  };
  for (const auto& spec : specs) {
    CAPTURE(bess::SchemeName(spec.scheme));
    const auto ledger = bess::run_backtest(Window(m.synth, 3 * 48, spec), m.data);
    REQUIRE(ledger.entries.size() == 144);
    CheckPhysics(ledger);
    const auto s = bess::Summarize(ledger);
    CHECK(s.solves == 144);
    CHECK(s.infeasible == 0);
    CHECK(s.max_iterations == 0);
    CHECK(s.profit == doctest::Approx(bess::annual_profit(ledger).total));
  }
}

TEST_CASE("repeated runs give identical ledgers") {
  const auto m = Synthetic(2, 9);
  const auto c = Window(m.synth, 96, {DiscountScheme::kPowerLaw, 0.95, 0.5, 2});
  CHECK(LedgerText(bess::run_backtest(c, m.data)) == LedgerText(bess::run_backtest(c, m.data)));
}

TEST_CASE("ledger file layout") {
  const auto m = Synthetic(1, 2);
  const auto text = LedgerText(bess::run_backtest(Window(m.synth, 2), m.data));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == bess::kLedgerHeader);
  std::getline(in, line);
  CHECK(line.starts_with("2024-01-01T04:00:00,48,"));
  CHECK(line.ends_with(",solved"));
}

TEST_CASE("constant prices satisfy the energy identity") {
  bess::SynthConfig synth;
  synth.days = 7;
  synth.amplitude = 0.0;
  synth.spike_probability = 0.0;
  synth.noise_scale = 0.0;
  const auto d = bess::synth_generate(synth);
  const bess::MarketData data{d.forecasts, d.actuals};
  const auto ledger = bess::run_backtest(Window(synth, 7 * 48), data);
  CheckPhysics(ledger);
  double discharged = 0.0;
  for (const auto& e : ledger.entries) {
    CHECK(e.mean_price == synth.base_price);
    discharged += e.power_mw * ledger.battery.dt;
  }
  CHECK(bess::annual_profit(ledger).total ==
        doctest::Approx(discharged * synth.base_price).epsilon(1e-12));
}

TEST_CASE("energy identity with a daily cycle") {
  const auto m = Synthetic(4, 4, 0.0);
  const auto ledger = bess::run_backtest(Window(m.synth, 4 * 48), m.data);
  CheckPhysics(ledger);
  double total = 0.0;
  for (const auto& e : ledger.entries) {
    const auto six = m.data.actuals.HalfHour(e.interval_start);
    REQUIRE(six.has_value());
    double sum = 0.0;
    for (double p : *six) sum += p;
    total += e.power_mw * ledger.battery.dt * sum / 6.0;
  }
  CHECK(bess::annual_profit(ledger).total == doctest::Approx(total).epsilon(1e-12));
  CHECK(total > 0.0);
}

TEST_CASE("missing snapshot policies") {
  auto m = Synthetic(2, 6);
  const Timestamp gap = m.synth.start.PlusMinutes(30 * 5);
  bess::SnapshotIndex pruned;
  for (const auto& [run, snap] : m.data.forecasts) {
    if (run != gap) pruned.Insert(snap);
  }
  m.data.forecasts = pruned;
  auto c = Window(m.synth, 10);

  try {
    bess::run_backtest(c, m.data);
    FAIL("expected a data error");
  } catch (const bess::DataError& e) {
    CHECK(std::string(e.what()).find(bess::FormatIso(gap)) != std::string::npos);
  }

  c.missing_snapshot = bess::MissingSnapshotPolicy::kForwardFill;
  const auto filled = bess::run_backtest(c, m.data);
  REQUIRE(filled.entries.size() == 10);
  CHECK(filled.entries[5].forward_filled);
  CHECK(filled.entries[5].status == bess::StepStatus::kSolved);
  CHECK(filled.entries[5].t_k == bess::horizon_length(gap));
  CHECK(bess::Summarize(filled).forward_filled == 1);
  CheckPhysics(filled);

  c.missing_snapshot = bess::MissingSnapshotPolicy::kSkipZeroDispatch;
  const auto skipped = bess::run_backtest(c, m.data);
  CHECK(skipped.entries[5].status == bess::StepStatus::kSkipped);
  CHECK(skipped.entries[5].power_mw == 0.0);
  CHECK(skipped.entries[5].soc == skipped.entries[4].soc);
  CHECK(bess::Summarize(skipped).skipped == 1);
  CheckPhysics(skipped);
}

TEST_CASE("missing actual prices are fatal") {
  auto m = Synthetic(1, 6);
  m.data.actuals.entries.erase(m.data.actuals.entries.begin() + 40);
  try {
    bess::run_backtest(Window(m.synth, 10), m.data);
    FAIL("expected a data error");
  } catch (const bess::DataError& e) {
    CHECK(std::string(e.what()).find("2024-01-01T07:00:00") != std::string::npos);
  }
}

TEST_CASE("short snapshots truncate the horizon") {
  auto m = Synthetic(1, 6);
  bess::SnapshotIndex shortened;
  for (auto [run, snap] : m.data.forecasts) {
    snap.entries.resize(std::min<std::size_t>(snap.entries.size(), 20));
    shortened.Insert(snap);
  }
  m.data.forecasts = shortened;
  const auto ledger = bess::run_backtest(Window(m.synth, 6), m.data);
  for (const auto& e : ledger.entries) CHECK(e.t_k == 20);
}

TEST_CASE("discounting beats the phantom spike") {
  const oracle::PhantomScenario scenario;
  const auto data = scenario.Market();
  const double step = 1.1 / 12.0;
  const DiscountSpec discounted{DiscountScheme::kPowerLaw, 0.95, 0.0, 1};

  const auto none = bess::run_backtest(scenario.Config({}), data);
  const auto power = bess::run_backtest(scenario.Config(discounted), data);
  CheckPhysics(none);
  CheckPhysics(power);
  const double none_profit = bess::annual_profit(none).total;
  const double power_profit = bess::annual_profit(power).total;
  CHECK(power_profit > none_profit);

  const auto none_dp = oracle::DpRealizedProfit(scenario, {}, step);
  const auto power_dp = oracle::DpRealizedProfit(scenario, discounted, step);
  CHECK(none_profit == doctest::Approx(none_dp.profit).epsilon(1e-6));
  CHECK(power_profit == doctest::Approx(power_dp.profit).epsilon(1e-6));
  CHECK(power_profit - none_profit ==
        doctest::Approx(power_dp.profit - none_dp.profit).epsilon(1e-6));
}

}  // TEST_SUITE
