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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include <doctest.h>

#include "bess/discount.hpp"
#include "oracles.hpp"

using bess::DiscountScheme;
using bess::DiscountSpec;

namespace {

constexpr DiscountScheme kDiscounted[] = {DiscountScheme::kSimulatedAnneal,
                                          DiscountScheme::kCosineAnneal,
                                          DiscountScheme::kPowerLaw};

DiscountSpec Spec(DiscountScheme scheme, double gamma0) {
  DiscountSpec s;
  s.scheme = scheme;
  s.gamma0 = gamma0;
  return s;
}

}  // namespace

TEST_SUITE("discount") {

TEST_CASE("scheme names round trip") {
  for (auto s : {DiscountScheme::kNone, DiscountScheme::kSimulatedAnneal,
                 DiscountScheme::kCosineAnneal, DiscountScheme::kPowerLaw}) {
    CHECK(bess::ParseScheme(bess::SchemeName(s)) == s);
  }
  CHECK(bess::SchemeName(DiscountScheme::kCosineAnneal) == "cosine_anneal");
  CHECK_THROWS_AS(bess::ParseScheme("Power_Law"), std::invalid_argument);
}

TEST_CASE("spec validation") {
  CHECK_NOTHROW(bess::RequireValid(DiscountSpec{}));
  CHECK_THROWS_AS(bess::RequireValid(DiscountSpec{DiscountScheme::kPowerLaw, 0.0, 0.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bess::RequireValid(DiscountSpec{DiscountScheme::kPowerLaw, 1.01, 0.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bess::RequireValid(DiscountSpec{DiscountScheme::kPowerLaw, 0.95, -1.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bess::RequireValid(DiscountSpec{DiscountScheme::kPowerLaw, 0.95, 0.0, 3}),
                  std::invalid_argument);
}

TEST_CASE("scheme none drops the regularizer") {
  const DiscountSpec s{DiscountScheme::kNone, 0.95, 1.0, 2};
  CHECK(s.Normalized().lambda == 0.0);
  CHECK(DiscountSpec{DiscountScheme::kPowerLaw, 0.95, 1.0, 2}.Normalized().lambda == 1.0);
}

TEST_CASE("weights at documented points") {
  for (auto s : kDiscounted) CHECK(bess::weight(Spec(s, 0.95), 1, 80) == 1.0);
  CHECK(bess::weight(Spec(DiscountScheme::kPowerLaw, 0.95), 2, 80) == 0.95);
  CHECK(bess::weight(Spec(DiscountScheme::kSimulatedAnneal, 0.95), 80, 80) ==
        doctest::Approx(0.3913609).epsilon(1e-6));
  CHECK(bess::weight(Spec(DiscountScheme::kCosineAnneal, 0.95), 80, 80) ==
        doctest::Approx(3.855e-4).epsilon(1e-3));
  CHECK(bess::weight(DiscountSpec{}, 37, 80) == 1.0);
  CHECK_THROWS_AS(bess::weight(Spec(DiscountScheme::kPowerLaw, 0.95), 0, 80),
                  std::invalid_argument);
  CHECK_THROWS_AS(bess::weight(Spec(DiscountScheme::kPowerLaw, 0.95), 81, 80),
                  std::invalid_argument);
}

TEST_CASE("gamma vectors for small horizons") {
  const auto flat = bess::build_gamma(DiscountSpec{}, 4);
  CHECK(flat.values().size() == 4);
  for (double w : flat.values()) CHECK(w == 1.0);

  const auto pl = bess::build_gamma(Spec(DiscountScheme::kPowerLaw, 0.95), 3);
  CHECK(pl[0] == 1.0);
  CHECK(pl[1] == 0.95);
  CHECK(pl[2] == doctest::Approx(0.9025).epsilon(1e-15));

  const auto cos2 = bess::build_gamma(Spec(DiscountScheme::kCosineAnneal, 0.95), 2);
  CHECK(cos2[0] == 1.0);
  CHECK(cos2[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cosine schedule ignores gamma0") {
  CHECK(bess::build_gamma(Spec(DiscountScheme::kCosineAnneal, 0.95), 48) ==
        bess::build_gamma(Spec(DiscountScheme::kCosineAnneal, 0.99), 48));
}

TEST_CASE("weights match a 50-digit evaluation") {
  double worst = 0.0;
  for (auto s : kDiscounted) {
    for (double g0 : {0.95, 0.99}) {
      for (int t = 1; t <= 80; ++t) {
        for (int n = 1; n <= t; ++n) {
          const double w = bess::weight(Spec(s, g0), n, t);
          worst = std::max(worst, std::abs(w - oracle::PreciseWeight(s, g0, n, t)));
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("schedules start at one, stay in (0, 1] and decrease strictly") {
  for (auto s : kDiscounted) {
    for (double g0 : {0.5, 0.95, 0.99}) {
      for (int t = 1; t <= 80; ++t) {
        const auto g = bess::build_gamma(Spec(s, g0), t);
        REQUIRE(g.horizon() == t);
        CHECK(g[0] == 1.0);
        for (int n = 1; n < t; ++n) {
          CHECK(g[n] > 0.0);
          CHECK(g[n] < g[n - 1]);
        }
      }
    }
  }
}

TEST_CASE("power law sits below simulated annealing and cosine crosses it once") {
  const auto pl = bess::build_gamma(Spec(DiscountScheme::kPowerLaw, 0.95), 80);
  const auto sa = bess::build_gamma(Spec(DiscountScheme::kSimulatedAnneal, 0.95), 80);
  const auto ca = bess::build_gamma(Spec(DiscountScheme::kCosineAnneal, 0.95), 80);
  for (int n : {20, 40, 60}) CHECK(pl[n - 1] < sa[n - 1]);
  int sign_changes = 0;
  for (int n = 2; n < 80; ++n) {
    const bool above = ca[n] > sa[n];
    const bool was_above = ca[n - 1] > sa[n - 1];
    if (above != was_above) ++sign_changes;
  }
  CHECK(sign_changes <= 1);
}

TEST_CASE("cache returns bit-identical vectors and computes once per key") {
  bess::GammaCache cache;
  const DiscountSpec s = Spec(DiscountScheme::kSimulatedAnneal, 0.99);
  const auto a = cache.Get(s, 48);
  const auto b = cache.Get(s, 48);
  CHECK(a == b);
  CHECK(*a == bess::build_gamma(s, 48));
  CHECK(cache.size() == 1);
  cache.Get(s, 47);
  CHECK(cache.size() == 2);
}

TEST_CASE("cache tolerates concurrent readers") {
  bess::GammaCache cache;
  std::vector<std::thread> workers;
  std::vector<const bess::GammaVector*> seen(8);
  for (int i = 0; i < 8; ++i) {
    workers.emplace_back([&, i] {
      for (int t = 1; t <= 80; ++t) cache.Get(Spec(DiscountScheme::kPowerLaw, 0.95), t);
      seen[static_cast<std::size_t>(i)] = cache.Get(Spec(DiscountScheme::kPowerLaw, 0.95), 80).get();
    });
  }
  for (auto& w : workers) w.join();
  CHECK(cache.size() == 80);
  for (auto* p : seen) CHECK(p == seen.front());
}

}  // TEST_SUITE
