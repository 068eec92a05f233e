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

#include "bess/discount.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bess {

std::string_view SchemeName(DiscountScheme scheme) {
  switch (scheme) {
    case DiscountScheme::kNone: return "none";
    case DiscountScheme::kSimulatedAnneal: return "simulated_anneal";
    case DiscountScheme::kCosineAnneal: return "cosine_anneal";
    case DiscountScheme::kPowerLaw: return "power_law";
  }
  return "none";
}

DiscountScheme ParseScheme(std::string_view name) {
  for (auto s : {DiscountScheme::kNone, DiscountScheme::kSimulatedAnneal,
                 DiscountScheme::kCosineAnneal, DiscountScheme::kPowerLaw}) {
    if (SchemeName(s) == name) return s;
  }
  throw std::invalid_argument("unknown discount scheme '" + std::string(name) + "'");
}

DiscountSpec DiscountSpec::Normalized() const {
  DiscountSpec out = *this;
  if (out.scheme == DiscountScheme::kNone) out.lambda = 0.0;
  return out;
}

void RequireValid(const DiscountSpec& spec) {
  if (!(spec.gamma0 > 0.0 && spec.gamma0 <= 1.0)) {
    throw std::invalid_argument("gamma0 must lie in (0, 1], got " +
                                std::to_string(spec.gamma0));
  }
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
    throw std::invalid_argument("lambda must be >= 0");
  }
  if (spec.norm_order != 1 && spec.norm_order != 2) {
    throw std::invalid_argument("norm order s must be 1 or 2, got " +
                                std::to_string(spec.norm_order));
  }
}

double weight(const DiscountSpec& spec, int lead, int horizon) {
  if (horizon < 1 || lead < 1 || lead > horizon) {
    throw std::invalid_argument("lead time " + std::to_string(lead) +
                                " outside [1, " + std::to_string(horizon) + "]");
  }
  const double m = static_cast<double>(lead - 1);
  const double t = static_cast<double>(horizon);
  switch (spec.scheme) {
    case DiscountScheme::kNone:
      return 1.0;
    case DiscountScheme::kSimulatedAnneal:
      return std::exp(-spec.gamma0 * m / t);
    case DiscountScheme::kCosineAnneal:
      return 0.5 + 0.5 * std::cos(m * std::numbers::pi / t);
    case DiscountScheme::kPowerLaw:
      return std::pow(spec.gamma0, m);
  }
  return 1.0;
}

GammaVector build_gamma(const DiscountSpec& spec, int horizon) {
  RequireValid(spec);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(horizon));
  for (int n = 1; n <= horizon; ++n) w[n - 1] = weight(spec, n, horizon);
  return GammaVector(std::move(w));
}

std::shared_ptr<const GammaVector> GammaCache::Get(const DiscountSpec& spec,
                                                   int horizon) {
  const Key key{static_cast<int>(spec.scheme), spec.gamma0, horizon};
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto& slot = entries_[key];
  if (!slot) slot = std::make_shared<const GammaVector>(build_gamma(spec, horizon));
  return slot;
}

std::size_t GammaCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

}  // namespace bess
