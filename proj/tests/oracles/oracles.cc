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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using bess::DiscountScheme;

double PreciseWeight(DiscountScheme scheme, double gamma0, int lead, int horizon) {
  using Real = boost::multiprecision::cpp_dec_float_50;
  const Real g0(gamma0);  // exact binary value of the input
  const Real m(lead - 1);
  const Real t(horizon);
  Real w = 1;
  switch (scheme) {
    case DiscountScheme::kNone:
      break;
    case DiscountScheme::kSimulatedAnneal:
      w = exp(-g0 * m / t);
      break;
    case DiscountScheme::kCosineAnneal:
      w = Real(0.5) + Real(0.5) * cos(m * boost::math::constants::pi<Real>() / t);
      break;
    case DiscountScheme::kPowerLaw:
      w = pow(g0, m);
      break;
  }
  return w.convert_to<double>();
}

double PlanValue(const bess::MpcInstance& inst, const std::vector<double>& powers) {
  const bool none = inst.spec.scheme == DiscountScheme::kNone;
  const double lambda = none ? 0.0 : inst.spec.lambda;
  double value = 0.0;
  for (std::size_t n = 0; n < powers.size(); ++n) {
    const double g = inst.gamma[static_cast<int>(n)];
    value += inst.prices[n] * g * powers[n];
    const double r = std::abs(powers[n] / g);
    value -= lambda * (inst.spec.norm_order == 1 ? r : r * r);
  }
  return value;
}

bool PlanFeasible(const bess::MpcInstance& inst, const std::vector<double>& powers,
                  double tolerance) {
  const auto& b = inst.params;
  double soc = inst.soc0;
  double moved = 0.0;
  for (double p : powers) {
    if (p < b.p_lower - tolerance || p > b.p_upper + tolerance) return false;
    soc -= b.eta * b.dt / b.e_nom * p;
    if (soc < b.soc_lower - tolerance || soc > b.soc_upper + tolerance) return false;
    moved += std::abs(p) * b.dt;
  }
  return moved <= static_cast<double>(powers.size()) / 48.0 * b.e_nom + tolerance;
}

GridBest GridSearch(const bess::MpcInstance& inst, double step) {
  const auto& b = inst.params;
  const int t = inst.horizon();
  const long lo = static_cast<long>(std::ceil(b.p_lower / step - 1e-9));
  const long hi = static_cast<long>(std::floor(b.p_upper / step + 1e-9));
  const double budget = t / 48.0 * b.e_nom;
  const double gain = b.eta * b.dt / b.e_nom;

  GridBest best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> p(static_cast<std::size_t>(t));
  std::function<void(int, double, double)> visit = [&](int n, double soc, double moved) {
    if (n == t) {
      ++best.evaluated;
      const double v = PlanValue(inst, p);
      if (v > best.value) {
        best.value = v;
        best.powers = p;
      }
      return;
    }
    for (long j = lo; j <= hi; ++j) {
      const double pj = static_cast<double>(j) * step;
      const double next_moved = moved + std::abs(pj) * b.dt;
      if (next_moved > budget + 1e-12) continue;
      const double next_soc = soc - gain * pj;
      if (next_soc < b.soc_lower - 1e-12 || next_soc > b.soc_upper + 1e-12) continue;
      p[static_cast<std::size_t>(n)] = pj;
      visit(n + 1, next_soc, next_moved);
    }
  };
  visit(0, inst.soc0, 0.0);
  return best;
}

double GridAllowance(const bess::MpcInstance& inst, double step) {
  const auto& b = inst.params;
  const bool none = inst.spec.scheme == DiscountScheme::kNone;
  const double lambda = none ? 0.0 : inst.spec.lambda;
  const double p_max = std::max(std::abs(b.p_lower), std::abs(b.p_upper));
  double total = 0.0;
  for (int n = 0; n < inst.horizon(); ++n) {
    const double g = inst.gamma[n];
    const double slope = inst.spec.norm_order == 1 ? 1.0 / g : 2.0 * p_max / (g * g);
    total += step * (std::abs(inst.prices[static_cast<std::size_t>(n)]) * g + lambda * slope);
  }
  return total;
}

double EnumeratedMinimum(const bess::CanonicalProgram& prog) {
  const int n = prog.num_variables();
  const int m = prog.num_constraints();
  const Eigen::MatrixXd& a = prog.constraints;
  std::vector<int> state(static_cast<std::size_t>(m), 0);  // 0 free, -1 lower, +1 upper
  double best = std::numeric_limits<double>::infinity();

  auto evaluate = [&] {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i) {
      if (state[static_cast<std::size_t>(i)] != 0) rows.push_back(i);
    }
    const int k = static_cast<int>(rows.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = prog.quad;
    rhs.head(n) = -prog.lin;
    for (int r = 0; r < k; ++r) {
      const int i = rows[static_cast<std::size_t>(r)];
      kkt.block(n + r, 0, 1, n) = a.row(i);
      kkt.block(0, n + r, n, 1) = a.row(i).transpose();
      rhs[n + r] = state[static_cast<std::size_t>(i)] < 0 ? prog.lower[i] : prog.upper[i];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs).head(n);
    const Eigen::VectorXd ax = a * x;
    for (int i = 0; i < m; ++i) {
      const double tol = 1e-9 * (1.0 + std::abs(ax[i]));
      if (ax[i] < prog.lower[i] - tol || ax[i] > prog.upper[i] + tol) return;
    }
    best = std::min(best, prog.Objective(x));
  };

  std::function<void(int, int)> assign = [&](int i, int active) {
    if (i == m) {
      evaluate();
      return;
    }
    state[static_cast<std::size_t>(i)] = 0;
    assign(i + 1, active);
    if (active == n) return;
    if (std::isfinite(prog.lower[i])) {
      state[static_cast<std::size_t>(i)] = -1;
      assign(i + 1, active + 1);
    }
    if (std::isfinite(prog.upper[i]) && prog.upper[i] != prog.lower[i]) {
      state[static_cast<std::size_t>(i)] = 1;
      assign(i + 1, active + 1);
    }
    state[static_cast<std::size_t>(i)] = 0;
  };
  assign(0, 0);
  return best;
}

bess::CanonicalProgram RandomProgram(std::mt19937_64& rng, const RandomProgramOptions& options) {
  std::uniform_int_distribution<int> pick_n(1, options.max_variables);
  std::uniform_int_distribution<int> pick_rows(0, options.max_general_rows);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int n = pick_n(rng);
  const int general = pick_rows(rng);
  const int m = general + n;
  bess::CanonicalProgram p;
  p.quad = Eigen::MatrixXd::Zero(n, n);
  p.lin.resize(n);
  p.constraints = Eigen::MatrixXd::Zero(m, n);
  p.lower.resize(m);
  p.upper.resize(m);

  Eigen::VectorXd box_lo(n), box_hi(n), x0(n);
  for (int j = 0; j < n; ++j) {
    box_lo[j] = -0.5 - 2.5 * unit(rng);
    box_hi[j] = 0.5 + 2.5 * unit(rng);
    x0[j] = box_lo[j] + (box_hi[j] - box_lo[j]) * unit(rng);
    p.lin[j] = 2.0 * normal(rng);
  }
  for (int i = 0; i < general; ++i) {
    for (int j = 0; j < n; ++j) {
      if (unit(rng) < 0.7) p.constraints(i, j) = normal(rng);
    }
    const double v = p.constraints.row(i).dot(x0);
    const double kind = unit(rng);
    if (kind < 0.15) {
      p.lower[i] = p.upper[i] = v;
    } else {
      p.lower[i] = kind < 0.45 ? -bess::kInfinity : v - unit(rng);
      p.upper[i] = kind > 0.75 ? bess::kInfinity : v + unit(rng);
    }
  }
  for (int j = 0; j < n; ++j) {
    p.constraints(general + j, j) = 1.0;
    p.lower[general + j] = box_lo[j];
    p.upper[general + j] = box_hi[j];
  }
  if (options.quadratic) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = normal(rng);
    }
    p.quad = b.transpose() * b + 0.1 * Eigen::MatrixXd::Identity(n, n);
  }
  p.variables = {{"x", 0, n}};
  p.rows = {{"general", 0, general}, {"box", general, n}};
  return p;
}

// ---- phantom-spike scenario ---------------------------------------------

double PhantomScenario::TruePrice(int interval) const {
  const bool spike = interval >= kSpikeFirst && interval <= kSpikeLast;
  return (spike ? 300.0 : 50.0) - 0.01 * interval;
}

double PhantomScenario::ForecastPrice(int run, int interval) const {
  const int lead = interval - run + 1;
  if (interval == kPhantomInterval && lead >= kPhantomMinLead) return 1000.0;
  return TruePrice(interval);
}

bess::MarketData PhantomScenario::Market() const {
  bess::MarketData data;
  data.actuals.region = "SIM1";
  for (int i = 0; i < kIntervals; ++i) {
    for (int j = 0; j < bess::kIntervalsPerHalfHour; ++j) {
      data.actuals.entries.push_back(
          {start.PlusMinutes(30 * i + 5 * j), TruePrice(i)});
    }
  }
  for (int k = 0; k < kIntervals; ++k) {
    bess::ForecastSnapshot snap;
    snap.run_time = start.PlusMinutes(30 * k);
    snap.region = "SIM1";
    for (int n = 0; n < kSnapshotLength; ++n) {
      snap.entries.push_back({start.PlusMinutes(30 * (k + n)), ForecastPrice(k, k + n)});
    }
    data.forecasts.Insert(std::move(snap));
  }
  return data;
}

bess::BacktestConfig PhantomScenario::Config(const bess::DiscountSpec& spec) const {
  bess::BacktestConfig c;
  c.battery = battery;
  c.discount = spec;
  c.initial_soc = initial_soc;
  c.start = start;
  c.end = start.PlusMinutes(30 * kIntervals);
  return c;
}

DpOutcome DpRealizedProfit(const PhantomScenario& sc, const bess::DiscountSpec& spec,
                           double step) {
  const auto& b = sc.battery;
  const double soc_unit = b.eta * b.dt / b.e_nom * step;
  const int max_units = static_cast<int>(std::floor(b.p_upper / step + 1e-9));
  const int min_units = static_cast<int>(std::ceil(b.p_lower / step - 1e-9));
  if (std::abs(max_units * step - b.p_upper) > 1e-12 ||
      std::abs(min_units * step - b.p_lower) > 1e-12) {
    throw std::invalid_argument("grid does not divide the power limits");
  }
  const int s_max = static_cast<int>(std::floor((b.soc_upper - b.soc_lower) / soc_unit + 1e-9));
  const double s0_real = (sc.initial_soc - b.soc_lower) / soc_unit;
  int s = static_cast<int>(std::lround(s0_real));
  if (std::abs(s - s0_real) > 1e-9) throw std::invalid_argument("initial SOC is off the grid");

  DpOutcome out;
  for (int k = 0; k < PhantomScenario::kIntervals; ++k) {
    const bess::Timestamp run = sc.start.PlusMinutes(30 * k);
    const int t = std::min(PhantomScenario::kSnapshotLength, bess::horizon_length(run));
    const double budget_units = t / 48.0 * b.e_nom / (b.dt * step);
    const int h_max = static_cast<int>(std::floor(budget_units + 1e-9));
    if (std::abs(h_max - budget_units) > 1e-9) {
      throw std::invalid_argument("grid does not divide the throughput limit");
    }
    std::vector<double> w(static_cast<std::size_t>(t));
    const bool none = spec.scheme == DiscountScheme::kNone;
    for (int n = 0; n < t; ++n) {
      const double g = none ? 1.0 : PreciseWeight(spec.scheme, spec.gamma0, n + 1, t);
      w[static_cast<std::size_t>(n)] = sc.ForecastPrice(k, k + n) * g * step;
    }

    // value[s][h]: best value from interval n on, holding s SOC units above the
    // floor with h throughput units already spent.
    const int width = h_max + 1;
    std::vector<double> value(static_cast<std::size_t>((s_max + 1) * width), 0.0);
    std::vector<double> next(value.size());
    int first = 0;
    for (int n = t - 1; n >= 0; --n) {
      for (int ss = 0; ss <= s_max; ++ss) {
        for (int h = 0; h <= h_max; ++h) {
          double best = -std::numeric_limits<double>::infinity();
          int best_j = 0;
          for (int j = min_units; j <= max_units; ++j) {
            const int s2 = ss - j;
            const int h2 = h + std::abs(j);
            if (s2 < 0 || s2 > s_max || h2 > h_max) continue;
            const double v = w[static_cast<std::size_t>(n)] * j +
                             value[static_cast<std::size_t>(s2 * width + h2)];
            // Prefer doing less on exact ties.
            if (v > best + 1e-9 || (v > best - 1e-9 && std::abs(j) < std::abs(best_j))) {
              best = v;
              best_j = j;
            }
          }
          next[static_cast<std::size_t>(ss * width + h)] = best;
          if (n == 0 && ss == s && h == 0) first = best_j;
        }
      }
      std::swap(value, next);
    }
    const double p = first * step;
    out.executed.push_back(p);
    out.profit += p * b.dt * sc.TruePrice(k);
    s -= first;
  }
  return out;
}

// ---- C/I/D reference reader ----------------------------------------------

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote");
  return out;
}

std::string Strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::string SlashTimeToIso(const std::string& text) {
  int y, mo, d, h, mi, se;
  char tail;
  if (std::sscanf(text.c_str(), "%d/%d/%d %d:%d:%d%c", &y, &mo, &d, &h, &mi, &se, &tail) != 6) {
    throw std::runtime_error("bad time '" + text + "'");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", y, mo, d, h, mi, se);
  return buf;
}

}  // namespace

std::vector<ReferenceRow> ReadReference(const std::string& text, const std::string& report,
                                        const std::string& table, const std::string& region_col,
                                        const std::string& run_col, const std::string& target_col,
                                        const std::string& price_col) {
  std::vector<ReferenceRow> rows;
  std::map<std::string, int> cols;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Strip(line).empty()) continue;
    const auto f = SplitFields(line);
    if (f[0] == "C") continue;
    if (f.size() < 4) throw std::runtime_error("short record");
    if (Strip(f[1]) != report || Strip(f[2]) != table) continue;
    if (f[0] == "I") {
      cols.clear();
      for (std::size_t i = 4; i < f.size(); ++i) cols[Strip(f[i])] = static_cast<int>(i);
      continue;
    }
    if (f[0] != "D") throw std::runtime_error("record type " + f[0]);
    auto at = [&](const std::string& name) { return Strip(f.at(static_cast<std::size_t>(cols.at(name)))); };
    ReferenceRow r;
    r.region = at(region_col);
    if (!run_col.empty()) r.run_time = SlashTimeToIso(at(run_col));
    r.target = SlashTimeToIso(at(target_col));
    const std::string price = at(price_col);
    char* stop = nullptr;
    r.price = std::strtod(price.c_str(), &stop);
    if (stop == price.c_str() || *stop != '\0') throw std::runtime_error("bad price " + price);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracle
