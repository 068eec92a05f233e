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
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "bess/solver.hpp"
#include "oracles.hpp"

namespace {

double MaxViolation(const bess::CanonicalProgram& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd ax = p.constraints * x;
  double worst = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    worst = std::max({worst, p.lower[i] - ax[i], ax[i] - p.upper[i]});
  }
  return worst;
}

bess::CanonicalProgram Box1(double lo, double hi, double cost) {
  bess::CanonicalProgram p;
  p.quad = Eigen::MatrixXd::Zero(1, 1);
  p.lin = Eigen::VectorXd::Constant(1, cost);
  p.constraints = Eigen::MatrixXd::Ones(1, 1);
  p.lower = Eigen::VectorXd::Constant(1, lo);
  p.upper = Eigen::VectorXd::Constant(1, hi);
  return p;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("settings validation") {
  CHECK_NOTHROW(bess::RequireValid(bess::SolverSettings{}));
  bess::SolverSettings s;
  s.eps_abs = 0.0;
  CHECK_THROWS_AS(bess::RequireValid(s), std::invalid_argument);
  s = {};
  s.max_iter = 0;
  CHECK_THROWS_AS(bess::RequireValid(s), std::invalid_argument);
  s = {};
  s.alpha = 2.0;
  CHECK_THROWS_AS(bess::RequireValid(s), std::invalid_argument);
}

TEST_CASE("one-dimensional box") {
  const auto r = bess::solve(Box1(-2.0, 3.0, 1.0));
  REQUIRE(r.status == bess::SolveStatus::kSolved);
  CHECK(r.x[0] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(r.y[0] < 0.0);  // lower bound binds
  CHECK(r.objective == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("equality-constrained quadratic") {
  bess::CanonicalProgram p;
  p.quad = Eigen::MatrixXd::Identity(2, 2);
  p.lin = Eigen::VectorXd::Zero(2);
  p.constraints = Eigen::MatrixXd::Ones(1, 2);
  p.lower = Eigen::VectorXd::Constant(1, 1.0);
  p.upper = Eigen::VectorXd::Constant(1, 1.0);
  const auto r = bess::solve(p);
  REQUIRE(r.status == bess::SolveStatus::kSolved);
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(bess::kkt_residuals(p, r.x, r.y).Max() <= 1e-8);
}

TEST_CASE("contradictory rows are reported infeasible") {
  bess::CanonicalProgram p;
  p.quad = Eigen::MatrixXd::Zero(1, 1);
  p.lin = Eigen::VectorXd::Ones(1);
  p.constraints = Eigen::MatrixXd::Ones(2, 1);
  p.lower = Eigen::Vector2d(1.0, -bess::kInfinity);
  p.upper = Eigen::Vector2d(bess::kInfinity, 0.0);
  CHECK(bess::solve(p).status == bess::SolveStatus::kPrimalInfeasible);
}

TEST_CASE("indefinite quadratic is rejected") {
  auto p = Box1(-1.0, 1.0, 0.0);
  p.quad(0, 0) = -1.0;
  CHECK_THROWS_AS(bess::solve(p), std::invalid_argument);
  auto q = Box1(-1.0, 1.0, 0.0);
  q.lower[0] = 2.0;
  CHECK_THROWS_AS(bess::RequireConsistent(q), std::invalid_argument);
}

TEST_CASE("iteration cap is reported") {
  std::mt19937_64 rng(3);
  const auto p = oracle::RandomProgram(rng, {false, 6, 3});
  bess::SolverSettings s;
  s.max_iter = 1;
  s.polish = false;
  s.check_interval = 1;
  const auto r = bess::solve(p, s);
  CHECK(r.status != bess::SolveStatus::kSolved);
  CHECK(r.iterations <= 1);
}

TEST_CASE("random small programs match active-set enumeration") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const bool quadratic = i % 2 == 1;
    const auto p = oracle::RandomProgram(rng, {quadratic, 6, 3});
    const double best = oracle::EnumeratedMinimum(p);
    REQUIRE(std::isfinite(best));
    const auto r = bess::solve(p);
    REQUIRE(r.status == bess::SolveStatus::kSolved);
    CHECK(MaxViolation(p, r.x) <= 1e-6);
    CHECK(std::abs(r.objective - best) <= 1e-5 * (1.0 + std::abs(best)));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("row and cost scaling does not change the optimum") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  for (int i = 0; i < 40; ++i) {
    const auto p = oracle::RandomProgram(rng, {i % 2 == 1, 6, 3});
    const auto base = bess::solve(p);
    REQUIRE(base.status == bess::SolveStatus::kSolved);

    bess::CanonicalProgram scaled = p;
    for (int r = 0; r < p.num_constraints(); ++r) {
      const double f = std::pow(10.0, exponent(rng));
      scaled.constraints.row(r) *= f;
      scaled.lower[r] *= f;
      scaled.upper[r] *= f;
    }
    const double c = std::pow(10.0, exponent(rng));
    scaled.quad *= c;
    scaled.lin *= c;
    const auto r = bess::solve(scaled);
    REQUIRE(r.status == bess::SolveStatus::kSolved);
    CHECK(std::abs(r.objective / c - base.objective) <= 1e-5 * (1.0 + std::abs(base.objective)));
    CHECK(MaxViolation(p, r.x) <= 1e-5);
  }
}

TEST_CASE("repeated solves are bit-identical") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto p = oracle::RandomProgram(rng, {i % 2 == 0, 6, 3});
    const auto a = bess::solve(p);
    const auto b = bess::solve(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }
}

TEST_CASE("reported residuals agree with an independent kkt check") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto p = oracle::RandomProgram(rng, {i % 2 == 0, 6, 3});
    const auto r = bess::solve(p);
    REQUIRE(r.status == bess::SolveStatus::kSolved);
    const auto k = bess::kkt_residuals(p, r.x, r.y);
    CHECK(k.primal_violation <= 1e-6);
    CHECK(k.stationarity <= 1e-5);
  }
}

}  // TEST_SUITE
