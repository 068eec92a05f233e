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

#include "bess/domain.hpp"

#include <cmath>
#include <stdexcept>

namespace bess {

std::vector<ParamViolation> validate_params(const BatteryParams& p) {
  std::vector<ParamViolation> out;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(p.e_nom) && p.e_nom > 0)) out.push_back({"e_nom", "must be > 0"});
  if (!(finite(p.dt) && p.dt > 0)) out.push_back({"dt", "must be > 0"});
  if (!(finite(p.eta) && p.eta > 0 && p.eta <= 1)) {
    out.push_back({"eta", "must lie in (0, 1]"});
  }
  if (!(finite(p.p_lower) && finite(p.p_upper) && p.p_lower < 0 && p.p_upper > 0)) {
    out.push_back({"power bounds", "require p_lower < 0 < p_upper"});
  }
  if (!(finite(p.soc_lower) && finite(p.soc_upper) && p.soc_lower >= 0 &&
        p.soc_lower < p.soc_upper && p.soc_upper <= 1)) {
    out.push_back({"soc bounds", "require 0 <= soc_lower < soc_upper <= 1"});
  }
  return out;
}

void RequireValid(const BatteryParams& params) {
  const auto violations = validate_params(params);
  if (violations.empty()) return;
  std::string msg = "invalid battery parameters:";
  for (const auto& v : violations) msg += " [" + v.field + ": " + v.message + "]";
  throw std::invalid_argument(msg);
}

bool WithinBounds(const SocState& state, const BatteryParams& params,
                  double tolerance) {
  return state.soc >= params.soc_lower - tolerance &&
         state.soc <= params.soc_upper + tolerance;
}

}  // namespace bess
