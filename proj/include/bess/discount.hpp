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

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

namespace bess {

enum class DiscountScheme { kNone, kSimulatedAnneal, kCosineAnneal, kPowerLaw };

// Serialized names: "none", "simulated_anneal", "cosine_anneal", "power_law".
std::string_view SchemeName(DiscountScheme scheme);
// Throws std::invalid_argument for unknown names.
DiscountScheme ParseScheme(std::string_view name);

// Lead-time weighting and the regularizer that together define the discounted
// MPC objective. gamma0 is unused by the cosine schedule but kept so one
// hyperparameter grid drives every scheme.
struct DiscountSpec {
  DiscountScheme scheme = DiscountScheme::kNone;
  double gamma0 = 1.0;
  double lambda = 0.0;
  int norm_order = 1;

  static DiscountSpec Standard() { return {}; }

  // scheme == kNone forces lambda to 0.
  DiscountSpec Normalized() const;

  bool operator==(const DiscountSpec&) const = default;
};

// Throws std::invalid_argument unless 0 < gamma0 <= 1, lambda >= 0 and
// norm_order is 1 or 2.
void RequireValid(const DiscountSpec& spec);

// Weight for lead time n (1-based) on a horizon of t_k intervals.
double weight(const DiscountSpec& spec, int lead, int horizon);

class GammaVector {
 public:
  GammaVector() = default;
  explicit GammaVector(std::vector<double> weights) : weights_(std::move(weights)) {}

  int horizon() const { return static_cast<int>(weights_.size()); }
  double operator[](int n) const { return weights_[n]; }  // 0-based
  std::span<const double> values() const { return weights_; }

  bool operator==(const GammaVector&) const = default;

 private:
  std::vector<double> weights_;
};

GammaVector build_gamma(const DiscountSpec& spec, int horizon);

// Memoizes build_gamma per (spec, horizon). Safe for concurrent readers; each
// key is computed at most once.
class GammaCache {
 public:
  std::shared_ptr<const GammaVector> Get(const DiscountSpec& spec, int horizon);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, double, int>;
  mutable std::shared_mutex mu_;
  std::map<Key, std::shared_ptr<const GammaVector>> entries_;
};

}  // namespace bess
