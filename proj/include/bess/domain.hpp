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

#include <string>
#include <vector>

#include "bess/timestamp.hpp"

namespace bess {

// Physical and operational limits of the storage asset. Power is positive when
// discharging (exporting) and negative when charging. SOC is a fraction of
// e_nom. Defaults describe a 1.1 MW / 2.2 MWh unit.
struct BatteryParams {
  double e_nom = 2.2;       // MWh
  double p_lower = -1.1;    // MW
  double p_upper = 1.1;     // MW
  double soc_lower = 0.1;
  double soc_upper = 1.0;
  double eta = 0.95;
  double dt = 0.5;          // hours

  // SOC change per MW held for one interval.
  double SocPerMw() const { return eta * dt / e_nom; }

  bool operator==(const BatteryParams&) const = default;
};

struct ParamViolation {
  std::string field;
  std::string message;
};

// Every violated invariant, one entry per field group; empty means valid.
std::vector<ParamViolation> validate_params(const BatteryParams& params);

// Throws std::invalid_argument listing all violations.
void RequireValid(const BatteryParams& params);

// One interval of the linear storage model. The result is not clamped.
inline double soc_step(double soc_prev, double power, const BatteryParams& params) {
  return soc_prev - params.SocPerMw() * power;
}

struct SocState {
  double soc = 0.0;
  Timestamp timestamp;
};

bool WithinBounds(const SocState& state, const BatteryParams& params,
                  double tolerance = 0.0);

}  // namespace bess
