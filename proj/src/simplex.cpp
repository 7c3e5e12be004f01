#include "crnzero/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "crnzero/errors.hpp"

namespace crnzero {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const LpOptions& opts)
      : rows_(a.rows()), vars_(a.cols()), opts_(opts), t_(Matrix::Zero(a.rows(), a.cols() + a.rows() + 1)),
        basis_(static_cast<std::size_t>(a.rows())) {
    for (Index i = 0; i < rows_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(vars_) = sign * a.row(i);
      t_(i, vars_ + i) = 1.0;
      t_(i, rhs()) = sign * b[i];
      basis_[static_cast<std::size_t>(i)] = vars_ + i;
    }
  }

  // Phase one; false when the artificial objective stays positive.
  bool phase_one(double b_scale) {
    Vector cost = Vector::Zero(rhs());
    cost.segment(vars_, rows_).setOnes();
    if (optimize(cost, rhs()) == LpStatus::kUnbounded) {
      throw NumericalError("simplex: phase one reported unbounded");
    }
    double infeasibility = 0.0;
    for (Index i = 0; i < rows_; ++i) {
      if (is_artificial(basis(i))) infeasibility += t_(i, rhs());
    }
    if (infeasibility > opts_.tol * (1.0 + b_scale)) return false;
    // Drive degenerate artificials out of the basis where possible.
    for (Index i = 0; i < rows_; ++i) {
      if (!is_artificial(basis(i))) continue;
      for (Index j = 0; j < vars_; ++j) {
        if (std::abs(t_(i, j)) > opts_.tol) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  LpStatus phase_two(const Vector& c) {
    Vector cost = Vector::Zero(rhs());
    cost.head(vars_) = c;
    return optimize(cost, vars_);
  }

  [[nodiscard]] Vector solution() const {
    Vector x = Vector::Zero(vars_);
    for (Index i = 0; i < rows_; ++i) {
      if (basis(i) < vars_) x[basis(i)] = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  [[nodiscard]] std::size_t pivots() const { return pivots_; }

 private:
  [[nodiscard]] Index rhs() const { return vars_ + rows_; }
  [[nodiscard]] Index basis(Index i) const { return basis_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] bool is_artificial(Index j) const { return j >= vars_; }

  void pivot(Index r, Index col) {
    if (++pivots_ > opts_.max_pivots) throw NumericalError("simplex: pivot limit exceeded");
    t_.row(r) /= t_(r, col);
    for (Index i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = col;
  }

  // Bland's rule over columns [0, allowed).
  LpStatus optimize(const Vector& cost, Index allowed) {
    std::vector<bool> in_basis(static_cast<std::size_t>(rhs()), false);
    for (;;) {
      std::fill(in_basis.begin(), in_basis.end(), false);
      for (Index b : basis_) in_basis[static_cast<std::size_t>(b)] = true;
      Index entering = -1;
      for (Index j = 0; j < allowed; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        double reduced = cost[j];
        for (Index i = 0; i < rows_; ++i) reduced -= cost[basis(i)] * t_(i, j);
        if (reduced < -opts_.tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;
      Index leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows_; ++i) {
        const double w = t_(i, entering);
        if (w <= opts_.tol) continue;
        const double ratio = t_(i, rhs()) / w;
        const bool take = leaving < 0 || ratio < best - opts_.tol ||
                          (std::abs(ratio - best) <= opts_.tol && basis(i) < basis(leaving));
        if (take) {
          best = leaving < 0 ? ratio : std::min(best, ratio);
          leaving = i;
        }
      }
      if (leaving < 0) return LpStatus::kUnbounded;
      pivot(leaving, entering);
    }
  }

  Index rows_;
  Index vars_;
  LpOptions opts_;
  Matrix t_;
  std::vector<Index> basis_;
  std::size_t pivots_ = 0;
};

struct Reduced {
  Matrix a;
  std::vector<Index> free;
};

Reduced reduce(const FeasibilityProblem& problem) {
  const Index n = problem.a.cols();
  if (problem.b.size() != problem.a.rows()) throw StructureError("feasibility: A and b disagree");
  if (!problem.fixed_zero.empty() && static_cast<Index>(problem.fixed_zero.size()) != n) {
    throw StructureError("feasibility: fixed_zero has wrong length");
  }
  Reduced r;
  for (Index k = 0; k < n; ++k) {
    if (problem.fixed_zero.empty() || !problem.fixed_zero[static_cast<std::size_t>(k)]) r.free.push_back(k);
  }
  r.a.resize(problem.a.rows(), static_cast<Index>(r.free.size()));
  for (std::size_t c = 0; c < r.free.size(); ++c) r.a.col(static_cast<Index>(c)) = problem.a.col(r.free[c]);
  return r;
}

Vector expand(const Reduced& r, const Vector& xf, Index n) {
  Vector x = Vector::Zero(n);
  for (std::size_t c = 0; c < r.free.size(); ++c) x[r.free[c]] = xf[static_cast<Index>(c)];
  return x;
}

void refine(const Matrix& a, const Vector& b, Vector& x, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return;
  const Vector residual = a * x - b;
  x -= a.completeOrthogonalDecomposition().solve(residual);
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 && x[i] > -tol) x[i] = 0.0;
  }
}

double scale_of(const Vector& b) { return b.size() ? b.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& opts) {
  if (b.size() != a.rows() || c.size() != a.cols()) throw StructureError("solve_lp: dimension mismatch");
  Tableau tab(a, b, opts);
  LpResult out;
  if (!tab.phase_one(scale_of(b))) {
    out.status = LpStatus::kInfeasible;
    out.pivots = tab.pivots();
    return out;
  }
  out.status = tab.phase_two(c);
  out.x = tab.solution();
  out.objective = c.dot(out.x);
  out.pivots = tab.pivots();
  return out;
}

std::optional<Vector> linear_feasibility(const FeasibilityProblem& problem, const LpOptions& opts) {
  const Reduced r = reduce(problem);
  const LpResult lp = solve_lp(r.a, problem.b, Vector::Zero(r.a.cols()), opts);
  if (lp.status == LpStatus::kInfeasible) return std::nullopt;
  Vector xf = lp.x;
  refine(r.a, problem.b, xf, std::sqrt(opts.tol));
  return expand(r, xf, problem.a.cols());
}

std::optional<MaxMinResult> maximize_min(const FeasibilityProblem& problem, double cap,
                                         const LpOptions& opts) {
  const Reduced r = reduce(problem);
  const Index rows = r.a.rows();
  const Index nf = r.a.cols();
  if (nf == 0) {
    auto x = linear_feasibility(problem, opts);
    if (!x) return std::nullopt;
    return MaxMinResult{*x, cap};
  }
  // Variables: x_F (nf), t, slacks s (nf), w with x_i - t - s_i = 0, t + w = cap.
  const Index cols = 2 * nf + 2;
  Matrix a = Matrix::Zero(rows + nf + 1, cols);
  Vector b = Vector::Zero(rows + nf + 1);
  a.topLeftCorner(rows, nf) = r.a;
  b.head(rows) = problem.b;
  for (Index i = 0; i < nf; ++i) {
    a(rows + i, i) = 1.0;
    a(rows + i, nf) = -1.0;
    a(rows + i, nf + 1 + i) = -1.0;
  }
  a(rows + nf, nf) = 1.0;
  a(rows + nf, cols - 1) = 1.0;
  b[rows + nf] = cap;
  Vector c = Vector::Zero(cols);
  c[nf] = -1.0;
  const LpResult lp = solve_lp(a, b, c, opts);
  if (lp.status == LpStatus::kInfeasible) return std::nullopt;
  if (lp.status == LpStatus::kUnbounded) throw NumericalError("maximize_min: capped program unbounded");
  Vector xf = lp.x.head(nf);
  refine(r.a, problem.b, xf, std::sqrt(opts.tol));
  MaxMinResult out{expand(r, xf, problem.a.cols()), xf.minCoeff()};
  return out;
}

}  // namespace crnzero
