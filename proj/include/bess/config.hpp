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
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bess/backtest.hpp"
#include "bess/marketdata.hpp"
#include "bess/synth.hpp"

namespace bess {

struct RawDataSource {
  std::filesystem::path raw_dir;       // forecast files
  std::filesystem::path actuals_file;  // file or directory
  AemoTableSpec forecast_spec = AemoTableSpec::ForecastDefaults();
  AemoTableSpec actual_spec = AemoTableSpec::ActualDefaults();
  std::string region;
};

// A run configuration file. Layout (all sections but "version" optional):
//   {"version": 1,
//    "battery":  {"e_nom", "p_lower", "p_upper", "soc_lower", "soc_upper",
//                 "eta", "dt", "initial_soc"},
//    "discount": {"scheme", "gamma0", "lambda", "s"},
//    "data":     {"raw_dir", "actuals_file", "region",
//                 "table_spec": {"forecasts": {...}, "actuals": {...}}}
//             or {"synthetic": {"days", "base_price", "amplitude",
//                 "spike_probability", "spike_magnitude", "phantom_probability",
//                 "phantom_lead_threshold", "noise_scale", "seed", "start",
//                 "region"}},
//    "window":   {"start", "end"},
//    "solver":   {"eps_abs", "eps_rel", "max_iter", "rho", "adaptive_rho",
//                 "alpha", "sigma", "polish", "scaling_iterations",
//                 "check_interval"},
//    "policy":   {"missing_snapshot", "invalid_data"}}
// Table spec sections take the AemoTableSpec field names. Unknown keys are
// rejected. Relative paths resolve against the config file's directory.
struct RunConfig {
  BacktestConfig backtest;
  bool window_given = false;  // synthetic runs default to the generated span
  std::variant<SynthConfig, RawDataSource> data;
  InvalidDataPolicy invalid_data = InvalidDataPolicy::kFail;
};

// Throws FormatError (naming the offending key path) on malformed JSON, unknown
// keys, wrong types or invalid values.
RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir = {},
                         const std::string& source = "<config>");

// Throws IoError when the file cannot be read.
RunConfig LoadRunConfig(const std::filesystem::path& file);

struct LoadedData {
  MarketData market;
  std::size_t forecast_rows = 0;
  std::size_t actual_rows = 0;
  std::vector<std::string> diagnostics;
};

// Generates or loads the configured data. For synthetic data without an
// explicit window, sets the window to the generated days.
LoadedData LoadMarketData(RunConfig& config);

}  // namespace bess
