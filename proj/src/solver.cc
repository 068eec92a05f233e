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

#include "bess/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

namespace bess {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityScale = 1e3;
constexpr double kRhoAdaptTolerance = 5.0;
constexpr double kEqualityTolerance = 1e-4;
constexpr double kPolishDelta = 1e-6;
constexpr int kPolishRefinements = 8;
constexpr int kPolishRounds = 40;
// Iterations between polish attempts while the active set keeps changing.
constexpr int kPolishPeriod = 500;
constexpr double kPolishRowTolerance = 1e-9;
// Once ADMM meets its tolerances without an accepted polish, it keeps going
// until the residuals shrink by this factor, polishing as the guessed active
// set changes, for at most kConvergedExtraFactor times the iterations so far.
constexpr double kDeepTolerance = 1e-3;
constexpr int kConvergedExtraFactor = 4;
// Squared-norm fraction of a row that must lie outside the span of the working set.
constexpr double kIndependenceTolerance = 1e-12;
constexpr double kPivotTolerance = 1e-9;
// Edge steps this short count as degenerate and switch pivoting to Bland's rule.
constexpr double kDegenerateStep = 1e-12;
// Working-set marker for rows with equal bounds; either multiplier sign is valid.
constexpr signed char kEqualitySide = 2;
constexpr double kDivisionTolerance = 1e-20;

double InfNorm(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

double LimitScaling(double v) {
  if (v < kMinScaling) return 1.0;
  return std::min(v, kMaxScaling);
}

enum class RowKind { kFree, kInequality, kEquality };

// Scaled problem data: P = c D Q D, A = E A0 D, q = c D q0, l = E l0, u = E u0.
struct ScaledProblem {
  SparseCol quad;  // full symmetric storage
  SparseCol cons;
  SparseRow cons_rows;  // same matrix, row-major
  VectorXd lin, lower, upper;
  VectorXd d, e, d_inv, e_inv;
  double c = 1.0, c_inv = 1.0;
  std::vector<RowKind> kinds;
  bool quad_is_zero = true;
};

ScaledProblem Equilibrate(const CanonicalProgram& prog, int iterations) {
  const Eigen::Index n = prog.num_variables();
  const Eigen::Index m = prog.num_constraints();
  SparseCol quad = prog.quad.sparseView(0.0, 0.0);
  quad.makeCompressed();
  SparseCol cons = prog.constraints.sparseView(0.0, 0.0);
  cons.makeCompressed();
  VectorXd lin = prog.lin;
  VectorXd d = VectorXd::Ones(n), e = VectorXd::Ones(m);
  double c = 1.0;

  const auto quad_col_norms = [&] {
    VectorXd out = VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < quad.outerSize(); ++j) {
      for (SparseCol::InnerIterator a(quad, j); a; ++a) {
        out[j] = std::max(out[j], std::abs(a.value()));
      }
    }
    return out;
  };

  for (int it = 0; it < iterations; ++it) {
    VectorXd col_norm = quad_col_norms();
    VectorXd row_norm = VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < cons.outerSize(); ++j) {
      for (SparseCol::InnerIterator a(cons, j); a; ++a) {
        const double v = std::abs(a.value());
        col_norm[j] = std::max(col_norm[j], v);
        row_norm[a.row()] = std::max(row_norm[a.row()], v);
      }
    }
    VectorXd dt(n), et(m);
    for (Eigen::Index j = 0; j < n; ++j) dt[j] = 1.0 / std::sqrt(LimitScaling(col_norm[j]));
    for (Eigen::Index i = 0; i < m; ++i) et[i] = 1.0 / std::sqrt(LimitScaling(row_norm[i]));

    for (Eigen::Index j = 0; j < quad.outerSize(); ++j) {
      for (SparseCol::InnerIterator a(quad, j); a; ++a) a.valueRef() *= dt[a.row()] * dt[j];
    }
    for (Eigen::Index j = 0; j < cons.outerSize(); ++j) {
      for (SparseCol::InnerIterator a(cons, j); a; ++a) a.valueRef() *= et[a.row()] * dt[j];
    }
    lin = dt.cwiseProduct(lin);
    d = d.cwiseProduct(dt);
    e = e.cwiseProduct(et);

    const double mean_col = n > 0 ? quad_col_norms().sum() / static_cast<double>(n) : 0.0;
    const double ct = 1.0 / LimitScaling(std::max(mean_col, InfNorm(lin)));
    quad *= ct;
    lin *= ct;
    c *= ct;
  }

  ScaledProblem s;
  s.quad = std::move(quad);
  s.quad_is_zero = s.quad.nonZeros() == 0;
  s.cons = std::move(cons);
  s.cons_rows = s.cons;
  s.lin = std::move(lin);
  s.lower = e.cwiseProduct(prog.lower);
  s.upper = e.cwiseProduct(prog.upper);
  s.d = d;
  s.e = e;
  s.d_inv = d.cwiseInverse();
  s.e_inv = e.cwiseInverse();
  s.c = c;
  s.c_inv = 1.0 / c;
  s.kinds.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool lo_inf = std::isinf(s.lower[i]);
    const bool up_inf = std::isinf(s.upper[i]);
    if (lo_inf && up_inf) {
      s.kinds[i] = RowKind::kFree;
    } else if (!lo_inf && !up_inf && s.upper[i] - s.lower[i] < kEqualityTolerance) {
      s.kinds[i] = RowKind::kEquality;
    } else {
      s.kinds[i] = RowKind::kInequality;
    }
  }
  return s;
}

// Rows `rows` of A as a sparse k x n matrix; rows with keep[r] == 0 are empty.
SparseCol SelectRows(const ScaledProblem& s, const std::vector<Eigen::Index>& rows,
                     const std::vector<char>* keep = nullptr) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (keep && !(*keep)[r]) continue;
    for (SparseRow::InnerIterator a(s.cons_rows, rows[r]); a; ++a) {
      trip.emplace_back(static_cast<Eigen::Index>(r), a.col(), a.value());
    }
  }
  SparseCol out(static_cast<Eigen::Index>(rows.size()), s.lin.size());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

// Unscaled termination quantities for an iterate in scaled space.
struct Residuals {
  double prim = 0.0, dual = 0.0;
  double eps_prim = 0.0, eps_dual = 0.0;
  // Scaled norms used by the penalty update.
  double prim_scaled = 0.0, dual_scaled = 0.0;
  double prim_norm_scaled = 0.0, dual_norm_scaled = 0.0;
};

Residuals ComputeResiduals(const ScaledProblem& s, const VectorXd& x,
                           const VectorXd& z, const VectorXd& y,
                           const SolverSettings& settings) {
  Residuals r;
  const VectorXd ax = s.cons * x;
  const VectorXd px = s.quad_is_zero ? VectorXd::Zero(x.size()) : VectorXd(s.quad * x);
  const VectorXd aty = s.cons.transpose() * y;

  r.prim = InfNorm(s.e_inv.cwiseProduct(ax - z));
  const double ax_norm = InfNorm(s.e_inv.cwiseProduct(ax));
  const double z_norm = InfNorm(s.e_inv.cwiseProduct(z));
  r.eps_prim = settings.eps_abs + settings.eps_rel * std::max(ax_norm, z_norm);

  r.dual = s.c_inv * InfNorm(s.d_inv.cwiseProduct(px + s.lin + aty));
  const double dual_scale =
      s.c_inv * std::max({InfNorm(s.d_inv.cwiseProduct(px)),
                          InfNorm(s.d_inv.cwiseProduct(aty)),
                          InfNorm(s.d_inv.cwiseProduct(s.lin))});
  r.eps_dual = settings.eps_abs + settings.eps_rel * dual_scale;

  r.prim_scaled = InfNorm(ax - z);
  r.prim_norm_scaled = std::max(InfNorm(ax), InfNorm(z));
  r.dual_scaled = InfNorm(px + s.lin + aty);
  r.dual_norm_scaled = std::max({InfNorm(px), InfNorm(aty), InfNorm(s.lin)});
  return r;
}

// g += w * a_i' a_i for row i of A.
void AddRowGram(const SparseRow& a, Eigen::Index i, double w, MatrixXd& g) {
  for (SparseRow::InnerIterator p(a, i); p; ++p) {
    const double wp = w * p.value();
    for (SparseRow::InnerIterator q(a, i); q; ++q) g(p.col(), q.col()) += wp * q.value();
  }
}

class KktFactor {
 public:
  KktFactor(const ScaledProblem& s, double sigma) : sigma_(sigma) {
    const Eigen::Index n = s.lin.size();
    const Eigen::Index m = s.lower.size();
    // Gram matrices per row class so a penalty change only recombines them.
    for (auto& g : gram_) g = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      AddRowGram(s.cons_rows, i, 1.0, gram_[static_cast<int>(s.kinds[i])]);
    }
    base_ = MatrixXd(s.quad);
    base_.diagonal().array() += sigma_;
  }

  // Returns false if the factorization fails (Q not PSD).
  bool Factor(double rho) {
    MatrixXd k = base_ + kRhoMin * gram_[0] + rho * gram_[1] +
                 kRhoEqualityScale * rho * gram_[2];
    llt_.compute(k);
    return llt_.info() == Eigen::Success;
  }

  VectorXd Solve(const VectorXd& rhs) const { return llt_.solve(rhs); }

 private:
  double sigma_;
  MatrixXd base_;
  MatrixXd gram_[3];
  Eigen::LLT<MatrixXd> llt_;
};

VectorXd RhoVector(const ScaledProblem& s, double rho) {
  VectorXd out(s.lower.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    switch (s.kinds[i]) {
      case RowKind::kFree: out[i] = kRhoMin; break;
      case RowKind::kInequality: out[i] = rho; break;
      case RowKind::kEquality: out[i] = kRhoEqualityScale * rho; break;
    }
  }
  return out;
}

// -1 lower active, +1 upper active, 0 inactive (OSQP's dual-sign heuristic).
std::vector<signed char> ActiveSet(const ScaledProblem& s, const VectorXd& z,
                                   const VectorXd& y) {
  std::vector<signed char> act(static_cast<std::size_t>(z.size()), 0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] - s.lower[i] < -y[i]) {
      act[i] = -1;
    } else if (s.upper[i] - z[i] < y[i]) {
      act[i] = 1;
    }
  }
  return act;
}

struct PolishOutcome {
  bool accepted = false;
  VectorXd x, y;
  Residuals res;
};

// Minimizer of the objective with the rows of the working set held at their
// active bound, from a regularized KKT system plus iterative refinement.
// Returns false on a failed factorization or non-finite result.
bool SolveOnWorkingSet(const ScaledProblem& s, const std::vector<Eigen::Index>& rows,
                       const std::vector<signed char>& act, VectorXd& x, VectorXd& yr) {
  const Eigen::Index k = static_cast<Eigen::Index>(rows.size());
  const SparseCol red = SelectRows(s, rows);
  VectorXd rhs_b(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::Index i = rows[r];
    rhs_b[r] = act[i] < 0 ? s.lower[i] : s.upper[i];
  }

  MatrixXd reduced = MatrixXd(s.quad);
  for (const Eigen::Index i : rows) AddRowGram(s.cons_rows, i, 1.0 / kPolishDelta, reduced);
  reduced.diagonal().array() += kPolishDelta;
  Eigen::LLT<MatrixXd> llt(reduced);
  if (llt.info() != Eigen::Success) return false;

  // [P + dI, R'; R, -dI] [dx; dy] = [r1; r2]
  auto solve_reg = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& dx,
                       VectorXd& dy) {
    dx = llt.solve(r1 + red.transpose() * r2 / kPolishDelta);
    dy = (red * dx - r2) / kPolishDelta;
  };

  solve_reg(-s.lin, rhs_b, x, yr);
  for (int it = 0; it < kPolishRefinements; ++it) {
    const VectorXd r1 = -s.lin - s.quad * x - red.transpose() * yr;
    const VectorXd r2 = rhs_b - red * x;
    if (InfNorm(r1) < 1e-14 && InfNorm(r2) < 1e-14) break;
    VectorXd dx, dy;
    solve_reg(r1, r2, dx, dy);
    x += dx;
    yr += dy;
  }
  return x.allFinite() && yr.allFinite();
}

// Working-set rows with a Cholesky factor L of their Gram matrix A_W A_W',
// stored row-major. A row joins only if it is not a combination of rows already
// held, so the equality system on the working set stays consistent. Rows join
// at the end and leave from any position in O(k^2).
class RowBasis {
 public:
  explicit RowBasis(const ScaledProblem& s)
      : s_(s),
        cap_(s.lin.size()),
        chol_(std::make_unique_for_overwrite<double[]>(static_cast<std::size_t>(cap_ * cap_))) {}

  const std::vector<Eigen::Index>& rows() const { return rows_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(rows_.size()); }

  bool TryAdd(Eigen::Index row) {
    const Eigen::Index k = size();
    if (k == cap_) return false;
    const double self = RowDot(row, row);
    if (self == 0.0) return false;
    VectorXd w = GramColumn(row);
    ForwardSolve(w);
    const double rest = self - w.squaredNorm();
    if (rest <= kIndependenceTolerance * self) return false;
    double* lk = Row(k);
    for (Eigen::Index j = 0; j < k; ++j) lk[j] = w[j];
    lk[k] = std::sqrt(rest);
    rows_.push_back(row);
    return true;
  }

  // Drops the row at `pos`; the factor of the remaining rows is the old one
  // with that row and column deleted plus a rank-one update of the trailing
  // block.
  void Remove(Eigen::Index pos) {
    const Eigen::Index k = size();
    const Eigen::Index p = k - 1 - pos;
    VectorXd x(p);
    for (Eigen::Index i = 0; i < p; ++i) x[i] = Row(pos + 1 + i)[pos];
    for (Eigen::Index i = pos + 1; i < k; ++i) {
      const double* src = Row(i);
      double* dst = Row(i - 1);
      for (Eigen::Index j = 0; j < pos; ++j) dst[j] = src[j];
      for (Eigen::Index j = pos + 1; j <= i; ++j) dst[j - 1] = src[j];
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      double* lj = Row(pos + j);
      const double diag = lj[pos + j];
      const double r = std::hypot(diag, x[j]);
      const double c = r / diag;
      const double sn = x[j] / diag;
      lj[pos + j] = r;
      for (Eigen::Index i = j + 1; i < p; ++i) {
        double& lij = Row(pos + i)[pos + j];
        lij = (lij + sn * x[i]) / c;
        x[i] = c * x[i] - sn * lij;
      }
    }
    rows_.erase(rows_.begin() + pos);
  }

  // Least-squares coefficients a with sum_j a_j A_{rows[j]} = A_row.
  VectorXd Coefficients(Eigen::Index row) const { return GramSolve(GramColumn(row)); }

  // y minimizing ||g + A_W' y||, refined once against the unfactored system.
  VectorXd LeastSquares(const VectorXd& g) const {
    VectorXd y = GramSolve(-Apply(g));
    const VectorXd r = g + ApplyTranspose(y);
    y -= GramSolve(Apply(r));
    return y;
  }

  // Minimum-norm d with A_W d = e, refined once.
  VectorXd Preimage(const VectorXd& e) const {
    VectorXd d = ApplyTranspose(GramSolve(e));
    d += ApplyTranspose(GramSolve(e - Apply(d)));
    return d;
  }

 private:
  double* Row(Eigen::Index i) { return chol_.get() + i * cap_; }
  const double* Row(Eigen::Index i) const { return chol_.get() + i * cap_; }

  void ForwardSolve(VectorXd& v) const {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double* li = Row(i);
      double sum = v[i];
      for (Eigen::Index j = 0; j < i; ++j) sum -= li[j] * v[j];
      v[i] = sum / li[i];
    }
  }

  void BackwardSolve(VectorXd& v) const {
    for (Eigen::Index i = v.size() - 1; i >= 0; --i) {
      const double* li = Row(i);
      v[i] /= li[i];
      for (Eigen::Index j = 0; j < i; ++j) v[j] -= li[j] * v[i];
    }
  }

  VectorXd GramSolve(VectorXd v) const {
    ForwardSolve(v);
    BackwardSolve(v);
    return v;
  }

  // A_W v and A_W' w.
  VectorXd Apply(const VectorXd& v) const {
    VectorXd out(size());
    for (Eigen::Index j = 0; j < size(); ++j) {
      double dot = 0.0;
      for (SparseRow::InnerIterator it(s_.cons_rows, rows_[j]); it; ++it) dot += it.value() * v[it.index()];
      out[j] = dot;
    }
    return out;
  }

  VectorXd ApplyTranspose(const VectorXd& w) const {
    VectorXd out = VectorXd::Zero(cap_);
    for (Eigen::Index j = 0; j < size(); ++j) {
      for (SparseRow::InnerIterator it(s_.cons_rows, rows_[j]); it; ++it) out[it.index()] += w[j] * it.value();
    }
    return out;
  }

  VectorXd GramColumn(Eigen::Index row) const {
    VectorXd v(size());
    for (Eigen::Index j = 0; j < size(); ++j) v[j] = RowDot(rows_[j], row);
    return v;
  }

  double RowDot(Eigen::Index a, Eigen::Index b) const {
    SparseRow::InnerIterator ia(s_.cons_rows, a), ib(s_.cons_rows, b);
    double sum = 0.0;
    while (ia && ib) {
      if (ia.index() < ib.index()) {
        ++ia;
      } else if (ib.index() < ia.index()) {
        ++ib;
      } else {
        sum += ia.value() * ib.value();
        ++ia;
        ++ib;
      }
    }
    return sum;
  }

  const ScaledProblem& s_;
  Eigen::Index cap_;
  std::unique_ptr<double[]> chol_;
  std::vector<Eigen::Index> rows_;
};

// Dual simplex step for a violated row v that depends on the working set:
// v enters with a multiplier growing from zero, the working-set multipliers move
// to keep stationarity, and the first to reach zero leaves. Returns the position
// of the leaving row, or -1 when none blocks (primal infeasible along this
// direction).
Eigen::Index ExchangeRow(const RowBasis& basis, const std::vector<signed char>& side,
                         const VectorXd& yr, Eigen::Index v) {
  const std::vector<Eigen::Index>& rows = basis.rows();
  const VectorXd alpha = basis.Coefficients(v);
  const double sigma = side[v] == -1 ? -1.0 : 1.0;

  Eigen::Index leave = -1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < basis.size(); ++r) {
    const signed char sr = side[rows[r]];
    if (sr == kEqualitySide) continue;
    const double d = -sigma * alpha[r];
    if (sr * d >= -kPivotTolerance) continue;
    const double t = std::max(0.0, -yr[r] / d);
    if (t < best) {
      best = t;
      leave = r;
    }
  }
  return leave;
}

// Longest step t <= max_step along d from x that keeps every row outside the
// working set within its bounds, with the row that blocks it (-1 if none).
std::pair<double, Eigen::Index> RatioTest(const ScaledProblem& s,
                                          const std::vector<char>& in_rows,
                                          const VectorXd& x, const VectorXd& d,
                                          double max_step) {
  const VectorXd ax = s.cons * x;
  const VectorXd ad = s.cons * d;
  double step = max_step;
  Eigen::Index block = -1;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    if (in_rows[i]) continue;
    const double noise = 1e-14 * (1.0 + std::abs(ax[i]));
    double limit;
    if (ad[i] > noise) {
      limit = (s.upper[i] - ax[i]) / ad[i];
    } else if (ad[i] < -noise) {
      limit = (s.lower[i] - ax[i]) / ad[i];
    } else {
      continue;
    }
    limit = std::max(limit, 0.0);
    if (limit < step) {
      step = limit;
      block = i;
    }
  }
  return {step, block};
}

signed char BlockingSide(const ScaledProblem& s, Eigen::Index row, const VectorXd& d) {
  if (s.lower[row] == s.upper[row]) return kEqualitySide;
  SparseRow::InnerIterator it(s.cons_rows, row);
  double ad = 0.0;
  for (; it; ++it) ad += it.value() * d[it.index()];
  return ad > 0.0 ? 1 : -1;
}

// Multipliers at a fixed point from nonnegative least squares (Lawson-Hanson):
// minimizes ||g + A_T' y|| over the rows T tight at x, with y_i <= 0 on rows at
// their lower bound, y_i >= 0 at their upper bound and equality rows free.
// Degenerate points, where more rows are tight than the multipliers need, are
// settled here without moving x. `warm` seeds the support.
VectorXd TightMultipliers(const ScaledProblem& s, const VectorXd& x, const VectorXd& warm,
                          std::vector<signed char>& tight_side) {
  const Eigen::Index m = s.lower.size();
  const VectorXd ax = s.cons * x;
  const VectorXd g = s.quad_is_zero ? VectorXd(s.lin) : VectorXd(s.quad * x + s.lin);
  tight_side.assign(static_cast<std::size_t>(m), 0);
  std::vector<Eigen::Index> tight;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double tol = kPolishRowTolerance * (1.0 + std::abs(ax[i]));
    const bool at_lower = ax[i] <= s.lower[i] + tol;
    const bool at_upper = ax[i] >= s.upper[i] - tol;
    if (!at_lower && !at_upper) continue;
    tight.push_back(i);
    tight_side[i] = at_lower && at_upper ? kEqualitySide : (at_lower ? -1 : 1);
  }
  auto feasible_sign = [&](Eigen::Index i, double yi) {
    return tight_side[i] == kEqualitySide || tight_side[i] * yi > 0.0;
  };

  VectorXd y = VectorXd::Zero(m);
  std::vector<Eigen::Index> passive;
  for (const Eigen::Index i : tight) {
    if (tight_side[i] == kEqualitySide || (warm[i] != 0.0 && feasible_sign(i, warm[i]))) {
      passive.push_back(i);
      y[i] = tight_side[i] == kEqualitySide ? 0.0 : warm[i];
    }
  }
  std::vector<char> excluded(static_cast<std::size_t>(m), 0);
  const double g_scale = 1.0 + InfNorm(g);

  RowBasis basis(s);
  for (const Eigen::Index i : passive) {
    if (!basis.TryAdd(i)) y[i] = 0.0;
  }
  for (std::size_t outer = 0; outer <= tight.size(); ++outer) {
    // Least squares on the passive set, backing off toward the current
    // feasible y whenever a multiplier would change sign.
    for (std::size_t inner = 0; inner <= tight.size(); ++inner) {
      const std::vector<Eigen::Index>& passive_rows = basis.rows();
      const VectorXd ls = basis.LeastSquares(g);
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < basis.size(); ++j) {
        const Eigen::Index i = passive_rows[j];
        if (feasible_sign(i, ls[j])) continue;
        alpha = std::min(alpha, std::max(y[i] / (y[i] - ls[j]), 0.0));
      }
      for (Eigen::Index j = 0; j < basis.size(); ++j) {
        const Eigen::Index i = passive_rows[j];
        y[i] += alpha * (ls[j] - y[i]);
      }
      if (alpha == 1.0) break;
      for (Eigen::Index j = basis.size() - 1; j >= 0; --j) {
        const Eigen::Index i = basis.rows()[j];
        if (feasible_sign(i, y[i])) continue;
        y[i] = 0.0;
        basis.Remove(j);
      }
    }

    // The tight row whose multiplier would most reduce the residual joins.
    const VectorXd resid = -(g + s.cons.transpose() * y);
    std::vector<char> in_passive(static_cast<std::size_t>(m), 0);
    for (const Eigen::Index i : basis.rows()) in_passive[i] = 1;
    Eigen::Index best = -1;
    double best_gain = kPolishRowTolerance * g_scale;
    for (const Eigen::Index i : tight) {
      if (in_passive[i] || excluded[i]) continue;
      double dot = 0.0;
      for (SparseRow::InnerIterator it(s.cons_rows, i); it; ++it) dot += it.value() * resid[it.index()];
      const double gain = tight_side[i] == kEqualitySide ? std::abs(dot) : tight_side[i] * dot;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) break;
    // A row is offered once; a dependent one cannot join.
    excluded[best] = 1;
    basis.TryAdd(best);
  }
  return y;
}

// Polishing: start from the active set guessed by the ADMM iterate, keeping an
// independent subset ordered by multiplier magnitude, and finish with a bounded
// number of active-set rounds. The point is accepted only if it meets the same
// termination criteria as ADMM, so a failed polish costs time but never
// accuracy.
PolishOutcome Polish(const ScaledProblem& s, const std::vector<signed char>& guess,
                     const VectorXd& y_admm, const SolverSettings& settings) {
  PolishOutcome out;
  const Eigen::Index m = s.lower.size();

  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (guess[i] != 0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(y_admm[a]) > std::abs(y_admm[b]);
  });
  std::vector<signed char> side(static_cast<std::size_t>(m), 0);
  for (const Eigen::Index i : order) side[i] = s.lower[i] == s.upper[i] ? kEqualitySide : guess[i];

  // Phase one looks for a working set whose minimizer is feasible. Phase two is
  // a primal active-set method from that point: it steps toward the minimizer
  // of the current working set, stops at the first blocking row, and releases
  // one wrong-signed row at a time.
  RowBasis basis(s);
  for (const Eigen::Index i : order) basis.TryAdd(i);
  const Eigen::Index n = s.lin.size();
  bool feasible = false;
  bool degenerate = false;
  VectorXd xf;
  for (int round = 0; round < kPolishRounds; ++round) {
    const std::vector<Eigen::Index> rows = basis.rows();
    if (rows.empty() && s.quad_is_zero) return out;

    VectorXd x, yr;
    if (s.quad_is_zero && basis.size() == n) {
      // LP vertex: the working set alone fixes both x and its multipliers.
      VectorXd b(n);
      for (Eigen::Index r = 0; r < n; ++r) b[r] = side[rows[r]] < 0 ? s.lower[rows[r]] : s.upper[rows[r]];
      x = basis.Preimage(b);
      yr = basis.LeastSquares(s.lin);
    } else if (!SolveOnWorkingSet(s, rows, side, x, yr)) {
      return out;
    }
    std::vector<char> in_rows(static_cast<std::size_t>(m), 0);
    for (const Eigen::Index i : rows) in_rows[i] = 1;

    if (!feasible) {
      const VectorXd ax = s.cons * x;
      std::vector<std::pair<double, Eigen::Index>> violated;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (in_rows[i]) continue;
        const double slack = kPolishRowTolerance * (1.0 + std::abs(ax[i]));
        const double over = std::max(ax[i] - s.upper[i], s.lower[i] - ax[i]);
        if (over > slack) violated.emplace_back(-over, i);
      }
      if (!violated.empty()) {
        std::sort(violated.begin(), violated.end());
        bool joined = false;
        for (const auto& [neg_over, i] : violated) {
          side[i] = s.lower[i] == s.upper[i] ? kEqualitySide : (ax[i] > s.upper[i] ? 1 : -1);
          joined = basis.TryAdd(i) || joined;
        }
        if (!joined) {
          const Eigen::Index entering = violated.front().second;
          const Eigen::Index leave = ExchangeRow(basis, side, yr, entering);
          if (leave < 0) return out;
          basis.Remove(leave);
          if (!basis.TryAdd(entering)) return out;
        }
        continue;
      }
      feasible = true;
      xf = x;
    } else {
      const VectorXd d = x - xf;
      const auto [step, block] = RatioTest(s, in_rows, xf, d, 1.0);
      if (block >= 0) {
        xf += step * d;
        side[block] = BlockingSide(s, block, d);
        if (!basis.TryAdd(block)) return out;
        continue;
      }
      xf = x;
    }

    // Working-set multipliers with any wrong sign clipped to zero.
    const VectorXd ax = s.cons * xf;
    const VectorXd z = ax.cwiseMax(s.lower).cwiseMin(s.upper);
    VectorXd y = VectorXd::Zero(m);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Eigen::Index i = rows[r];
      const double yi = yr[static_cast<Eigen::Index>(r)];
      if (side[i] == kEqualitySide || side[i] * yi > 0.0) y[i] = yi;
    }
    out.res = ComputeResiduals(s, xf, z, y, settings);
    if (out.res.prim > out.res.eps_prim || out.res.dual > out.res.eps_dual) {
      std::vector<signed char> tight_side;
      const VectorXd y_tight = TightMultipliers(s, xf, y, tight_side);
      const Residuals res = ComputeResiduals(s, xf, z, y_tight, settings);
      if (res.prim <= res.eps_prim && res.dual <= res.eps_dual) {
        out.res = res;
        y = y_tight;
      }
    }
    if (out.res.prim <= out.res.eps_prim && out.res.dual <= out.res.eps_dual) {
      out.accepted = true;
      out.x = xf;
      out.y = y;
      return out;
    }

    // Release the row pushing hardest the wrong way, or after a degenerate
    // step the lowest-indexed wrong-signed row (Bland's rule, so no cycling).
    const double cut = kPolishRowTolerance * (1.0 + InfNorm(yr));
    Eigen::Index release = -1;
    double worst = cut;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Eigen::Index i = rows[r];
      if (side[i] == kEqualitySide) continue;
      const double wrong = -side[i] * yr[static_cast<Eigen::Index>(r)];
      if (wrong <= cut) continue;
      const bool better = degenerate ? (release < 0 || i < rows[release]) : wrong > worst;
      if (better) {
        worst = wrong;
        release = static_cast<Eigen::Index>(r);
      }
    }
    if (release < 0) return out;
    if (s.quad_is_zero && basis.size() == n) {
      // LP vertex: follow the edge that leaves the released row.
      VectorXd e = VectorXd::Zero(n);
      e[release] = side[rows[release]] < 0 ? 1.0 : -1.0;
      const VectorXd d = basis.Preimage(e);
      in_rows[rows[release]] = 0;
      const auto [step, block] =
          RatioTest(s, in_rows, xf, d, std::numeric_limits<double>::infinity());
      if (block < 0) return out;
      degenerate = degenerate || step <= kDegenerateStep;
      xf += step * d;
      side[block] = BlockingSide(s, block, d);
      basis.Remove(release);
      if (!basis.TryAdd(block)) return out;
      continue;
    }
    basis.Remove(release);
  }
  return out;
}

bool PrimalInfeasible(const ScaledProblem& s, VectorXd delta_y,
                      const SolverSettings& settings) {
  for (Eigen::Index i = 0; i < delta_y.size(); ++i) {
    if (std::isinf(s.upper[i]) && delta_y[i] > 0) delta_y[i] = 0;
    if (std::isinf(s.lower[i]) && delta_y[i] < 0) delta_y[i] = 0;
  }
  const double norm = InfNorm(s.e.cwiseProduct(delta_y));
  if (norm < kDivisionTolerance) return false;
  double support = 0.0;
  for (Eigen::Index i = 0; i < delta_y.size(); ++i) {
    if (delta_y[i] > 0) support += s.upper[i] * delta_y[i];
    if (delta_y[i] < 0) support += s.lower[i] * delta_y[i];
  }
  if (!(support < -settings.eps_prim_inf * norm)) return false;
  const VectorXd aty = s.cons.transpose() * delta_y;
  return InfNorm(s.d_inv.cwiseProduct(aty)) < settings.eps_prim_inf * norm;
}

void CheckPositiveSemidefinite(const MatrixXd& quad) {
  if (quad.size() == 0 || quad.isZero(0.0)) return;
  if (MatrixXd(quad.diagonal().asDiagonal()) == quad) {
    if ((quad.diagonal().array() < 0.0).any()) {
      throw std::invalid_argument("quadratic cost is not positive semidefinite");
    }
    return;
  }
  const double scale = 1.0 + quad.cwiseAbs().maxCoeff();
  MatrixXd shifted = quad;
  shifted.diagonal().array() += 1e-9 * scale;
  Eigen::LLT<MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("quadratic cost is not positive semidefinite");
  }
}

}  // namespace

void RequireValid(const SolverSettings& s) {
  if (!(s.eps_abs > 0) || !(s.eps_rel > 0)) {
    throw std::invalid_argument("solver tolerances must be > 0");
  }
  if (s.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(s.alpha >= 1.0 && s.alpha < 2.0)) {
    throw std::invalid_argument("alpha must lie in [1, 2)");
  }
  if (!(s.rho > 0) || !(s.sigma > 0)) {
    throw std::invalid_argument("rho and sigma must be > 0");
  }
  if (s.check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
  if (s.scaling_iterations < 0) {
    throw std::invalid_argument("scaling_iterations must be >= 0");
  }
}

std::string_view StatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kSolved: return "solved";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kPrimalInfeasible: return "primal_infeasible";
  }
  return "unknown";
}

SolveResult solve(const CanonicalProgram& program, const SolverSettings& settings) {
  RequireConsistent(program);
  RequireValid(settings);
  CheckPositiveSemidefinite(program.quad);

  const ScaledProblem s = Equilibrate(program, settings.scaling_iterations);
  const Eigen::Index n = s.lin.size();
  const Eigen::Index m = s.lower.size();

  double rho = settings.rho;
  VectorXd rho_vec = RhoVector(s, rho);
  KktFactor kkt(s, settings.sigma);
  if (!kkt.Factor(rho)) {
    throw std::invalid_argument("quadratic cost is not positive semidefinite");
  }

  VectorXd x = VectorXd::Zero(n), z = VectorXd::Zero(m), y = VectorXd::Zero(m);
  VectorXd x_prev(n), z_prev(m), y_prev(m), rhs(n), xt(n), zt(m), zr(m);
  const double alpha = settings.alpha;

  SolveResult result;
  Residuals res;
  bool done = false;
  std::vector<signed char> last_active, last_polished;
  PolishOutcome polished;
  int converged_at = 0;  // first check meeting the ADMM tolerances

  int iter = 0;
  for (iter = 1; iter <= settings.max_iter; ++iter) {
    x_prev = x;
    z_prev = z;
    y_prev = y;

    rhs = settings.sigma * x_prev - s.lin;
    rhs.noalias() += s.cons.transpose() * (rho_vec.cwiseProduct(z_prev) - y);
    xt = kkt.Solve(rhs);
    zt.noalias() = s.cons * xt;
    x = alpha * xt + (1.0 - alpha) * x_prev;
    zr = alpha * zt + (1.0 - alpha) * z_prev;
    z = (zr + y.cwiseQuotient(rho_vec)).cwiseMax(s.lower).cwiseMin(s.upper);
    y += rho_vec.cwiseProduct(zr - z);

    const bool check = iter % settings.check_interval == 0 || iter == settings.max_iter;
    if (!check) continue;

    res = ComputeResiduals(s, x, z, y, settings);
    const bool within = res.prim <= res.eps_prim && res.dual <= res.eps_dual;
    if (within && converged_at == 0) converged_at = iter;
    if (within && (!settings.polish ||
                   (res.prim <= kDeepTolerance * res.eps_prim &&
                    res.dual <= kDeepTolerance * res.eps_dual))) {
      result.status = SolveStatus::kSolved;
      done = true;
      break;
    }
    if (converged_at > 0 && iter >= converged_at * (1 + kConvergedExtraFactor)) {
      result.status = SolveStatus::kSolved;
      done = true;
      break;
    }
    if (converged_at == 0 && PrimalInfeasible(s, y - y_prev, settings)) {
      result.status = SolveStatus::kPrimalInfeasible;
      done = true;
      break;
    }

    if (settings.polish) {
      auto active = ActiveSet(s, z, y);
      const bool stable =
          converged_at > 0 || active == last_active || iter % kPolishPeriod == 0;
      if (stable && active != last_polished) {
        last_polished = active;
        PolishOutcome attempt = Polish(s, active, y, settings);
        if (attempt.accepted) {
          polished = std::move(attempt);
          result.status = SolveStatus::kSolved;
          done = true;
          break;
        }
      }
      last_active = std::move(active);
    }

    if (settings.adaptive_rho && res.prim_norm_scaled > 0 && res.dual_norm_scaled > 0 &&
        res.dual_scaled > 0) {
      const double ratio = (res.prim_scaled / res.prim_norm_scaled) /
                           (res.dual_scaled / res.dual_norm_scaled);
      double estimate = rho * std::sqrt(ratio);
      estimate = std::clamp(estimate, kRhoMin, kRhoMax);
      if (estimate > kRhoAdaptTolerance * rho || estimate < rho / kRhoAdaptTolerance) {
        rho = estimate;
        rho_vec = RhoVector(s, rho);
        kkt.Factor(rho);
      }
    }
  }
  if (!done) {
    result.status = converged_at > 0 ? SolveStatus::kSolved : SolveStatus::kMaxIterations;
    iter = settings.max_iter;
  }

  // Final refinement of an ADMM-terminated iterate.
  if (settings.polish && !polished.accepted &&
      result.status != SolveStatus::kPrimalInfeasible) {
    PolishOutcome attempt = Polish(s, ActiveSet(s, z, y), y, settings);
    if (attempt.accepted) {
      polished = std::move(attempt);
      result.status = SolveStatus::kSolved;
    }
  }

  VectorXd x_scaled = polished.accepted ? polished.x : x;
  VectorXd y_scaled = polished.accepted ? polished.y : y;
  const Residuals& final_res = polished.accepted ? polished.res : res;

  result.x = s.d.cwiseProduct(x_scaled);
  result.y = s.e.cwiseProduct(y_scaled) * s.c_inv;
  result.iterations = iter;
  result.polished = polished.accepted;
  result.primal_residual = final_res.prim;
  result.dual_residual = final_res.dual;
  result.objective = program.Objective(result.x);
  return result;
}

double KktReport::Max() const {
  return std::max({primal_violation, stationarity, complementarity});
}

KktReport kkt_residuals(const CanonicalProgram& program, const VectorXd& x,
                        const VectorXd& y) {
  RequireConsistent(program);
  if (x.size() != program.num_variables() || y.size() != program.num_constraints()) {
    throw std::invalid_argument("primal/dual dimensions do not match the program");
  }
  KktReport report;
  const VectorXd ax = program.constraints * x;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    const double lo = program.lower[i], up = program.upper[i];
    const double viol = std::max({ax[i] - up, lo - ax[i], 0.0});
    report.primal_violation = std::max(report.primal_violation, viol);
    double gap = 0.0;
    if (y[i] > 0) gap = std::isinf(up) ? kInfinity : y[i] * std::abs(up - ax[i]);
    if (y[i] < 0) gap = std::isinf(lo) ? kInfinity : -y[i] * std::abs(ax[i] - lo);
    report.complementarity = std::max(report.complementarity, gap);
  }
  report.stationarity =
      InfNorm(program.quad * x + program.lin + program.constraints.transpose() * y);
  return report;
}

}  // namespace bess
