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

#include <cstdint>
#include <string>
#include <vector>

#include "bess/marketdata.hpp"
#include "bess/timestamp.hpp"

namespace bess {

// Synthetic market: 5-minute prices follow a daily sinusoid with occasional
// half-hour spikes. Forecasts see the half-hour means times (1 + noise_scale *
// n * z), with n the lead time and z a standard normal draw per target trading
// day, and on some days a phantom spike at the day's last half-hour that is
// only forecast at leads beyond phantom_lead_threshold. A zero noise_scale
// gives perfect forecasts: no noise and no phantoms.
struct SynthConfig {
  int days = 7;
  double base_price = 80.0;          // $/MWh
  double amplitude = 40.0;           // $/MWh, daily cycle
  double spike_probability = 0.3;    // per trading day
  double spike_magnitude = 1500.0;   // $/MWh added during a spike
  double phantom_probability = 0.3;  // per trading day
  int phantom_lead_threshold = 8;    // half-hours
  double noise_scale = 0.01;         // relative error spread per lead step
  std::uint64_t seed = 7;
  Timestamp start = Timestamp::FromCivil(2024, 1, 1, 4, 0, 0);
  std::string region = "SYN1";
};

// Throws std::invalid_argument on negative magnitudes, probabilities outside
// [0, 1], days < 1 or an unaligned start.
void RequireValid(const SynthConfig& config);

struct SpikeEvent {
  Timestamp interval;  // half-hour start
  double magnitude = 0.0;
};

struct SynthData {
  ActualPriceSeries actuals;   // days * 288 five-minute prices from start
  SnapshotIndex forecasts;     // one run per half-hour of the covered days
  std::vector<SpikeEvent> spikes;    // realized
  std::vector<SpikeEvent> phantoms;  // forecast only
};

SynthData synth_generate(const SynthConfig& config);

}  // namespace bess
