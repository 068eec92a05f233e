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

#include "bess/synth.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bess {

namespace {

constexpr int kHalfHoursPerDay = 48;
// Forecast targets reach up to two trading days past the last run.
constexpr int kLookaheadDays = 2;
constexpr int kPhantomSlot = kHalfHoursPerDay - 1;

double DailyCycle(const SynthConfig& c, Timestamp t) {
  const double hours = static_cast<double>(t.SecondOfDay()) / 3600.0;
  // Trough at 04:00, peak at 16:00.
  return c.base_price + c.amplitude * std::sin(2.0 * std::numbers::pi * (hours - 10.0) / 24.0);
}

}  // namespace

void RequireValid(const SynthConfig& c) {
  if (c.days < 1) throw std::invalid_argument("synthetic days must be >= 1");
  if (!(c.amplitude >= 0) || !(c.spike_magnitude >= 0) || !(c.noise_scale >= 0)) {
    throw std::invalid_argument("synthetic magnitudes must be >= 0");
  }
  if (!std::isfinite(c.base_price)) throw std::invalid_argument("base price must be finite");
  for (const double p : {c.spike_probability, c.phantom_probability}) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  if (c.phantom_lead_threshold < 0) {
    throw std::invalid_argument("phantom lead threshold must be >= 0");
  }
  if (!IsHalfHourAligned(c.start)) {
    throw std::invalid_argument("synthetic start must be half-hour aligned");
  }
}

SynthData synth_generate(const SynthConfig& c) {
  RequireValid(c);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> slot(0, kHalfHoursPerDay - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int total_days = c.days + kLookaheadDays;
  const int total_half_hours = total_days * kHalfHoursPerDay;
  SynthData out;
  std::map<Timestamp, double> spike_at, phantom_at;
  std::vector<double> day_error(static_cast<std::size_t>(total_days));
  // Phantom spikes are forecast errors too; zero noise means perfect foresight.
  const bool perfect = c.noise_scale == 0.0;
  // Fixed draw order per day keeps every stream reproducible from the seed.
  for (int d = 0; d < total_days; ++d) {
    const Timestamp day = c.start.PlusMinutes(static_cast<std::int64_t>(d) * 24 * 60);
    const bool spike = unit(rng) < c.spike_probability;
    const int spike_slot = slot(rng);
    const bool phantom = unit(rng) < c.phantom_probability;
    day_error[static_cast<std::size_t>(d)] = normal(rng);
    if (spike) {
      const Timestamp t = day.PlusMinutes(spike_slot * kHalfHourMinutes);
      spike_at[t] = c.spike_magnitude;
      out.spikes.push_back({t, c.spike_magnitude});
    }
    // Phantoms sit on the last half-hour of a trading day, the tail interval of
    // every horizon that reaches it, so each lead beyond the threshold sees it.
    // The first day is skipped because its tail is only reachable at short leads.
    if (phantom && !perfect && d > 0 && !(spike && spike_slot == kPhantomSlot)) {
      const Timestamp t = day.PlusMinutes(kPhantomSlot * kHalfHourMinutes);
      phantom_at[t] = c.spike_magnitude;
      out.phantoms.push_back({t, c.spike_magnitude});
    }
  }

  std::vector<double> truth_mean(static_cast<std::size_t>(total_half_hours));
  out.actuals.region = c.region;
  for (int h = 0; h < total_half_hours; ++h) {
    const Timestamp half = c.start.PlusMinutes(static_cast<std::int64_t>(h) * kHalfHourMinutes);
    const auto spike = spike_at.find(half);
    std::array<double, kIntervalsPerHalfHour> six{};
    for (int j = 0; j < kIntervalsPerHalfHour; ++j) {
      const Timestamp t = half.PlusMinutes(j * kFiveMinutes);
      six[static_cast<std::size_t>(j)] =
          DailyCycle(c, t) + (spike == spike_at.end() ? 0.0 : spike->second);
      if (h < c.days * kHalfHoursPerDay) {
        out.actuals.entries.push_back({t, six[static_cast<std::size_t>(j)]});
      }
    }
    truth_mean[static_cast<std::size_t>(h)] = MeanOfSix(six);
  }

  for (int r = 0; r < c.days * kHalfHoursPerDay; ++r) {
    ForecastSnapshot snap;
    snap.run_time = c.start.PlusMinutes(static_cast<std::int64_t>(r) * kHalfHourMinutes);
    snap.region = c.region;
    const int length = horizon_length(snap.run_time);
    for (int n = 1; n <= length; ++n) {
      const auto h = static_cast<std::size_t>(r + n - 1);
      const Timestamp target = snap.run_time.PlusMinutes((n - 1) * kHalfHourMinutes);
      // Relative error with a standardized factor per target trading day,
      // scaled by lead time.
      const double z = day_error[h / kHalfHoursPerDay];
      double price = truth_mean[h] + c.noise_scale * n * z * std::abs(truth_mean[h]);
      if (n > c.phantom_lead_threshold) {
        const auto phantom = phantom_at.find(target);
        if (phantom != phantom_at.end()) price += phantom->second;
      }
      snap.entries.push_back({target, price});
    }
    out.forecasts.Insert(std::move(snap));
  }
  return out;
}

}  // namespace bess
