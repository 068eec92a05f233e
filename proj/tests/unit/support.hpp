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

#include <filesystem>
#include <random>

#include "bess/domain.hpp"
#include "bess/mpc.hpp"

namespace testutil {

inline std::filesystem::path Fixture(const std::string& relative) {
  return std::filesystem::path(BESS_FIXTURE_DIR) / relative;
}

// Scratch directory unique to the running test case, emptied on creation.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bess_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Battery limits and starting SOC drawn around the reference unit.
inline bess::BatteryParams RandomBattery(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bess::BatteryParams b;
  b.e_nom = 1.0 + 3.0 * u(rng);
  b.p_upper = 0.5 + 1.5 * u(rng);
  b.p_lower = -(0.5 + 1.5 * u(rng));
  b.soc_lower = 0.2 * u(rng);
  b.soc_upper = 0.8 + 0.2 * u(rng);
  b.eta = 0.85 + 0.15 * u(rng);
  return b;
}

inline bess::DiscountSpec RandomSpec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  bess::DiscountSpec s;
  s.scheme = static_cast<bess::DiscountScheme>(pick(rng));
  s.gamma0 = pick(rng) % 2 == 0 ? 0.95 : 0.99;
  const double lambdas[] = {0.0, 0.5, 1.0};
  s.lambda = lambdas[pick(rng) % 3];
  s.norm_order = 1 + pick(rng) % 2;
  return s;
}

// Valid instance of the given horizon with prices in [-100, 300] plus an
// occasional spike.
inline bess::MpcInstance RandomInstance(std::mt19937_64& rng, int horizon) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bess::MpcInstance in;
  in.params = RandomBattery(rng);
  in.spec = RandomSpec(rng).Normalized();
  in.gamma = bess::build_gamma(in.spec, horizon);
  in.soc0 = in.params.soc_lower + (in.params.soc_upper - in.params.soc_lower) * u(rng);
  for (int n = 0; n < horizon; ++n) {
    double p = -100.0 + 400.0 * u(rng);
    if (u(rng) < 0.1) p += 2000.0 * u(rng);
    in.prices.push_back(p);
  }
  return in;
}

}  // namespace testutil
