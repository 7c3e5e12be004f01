#pragma once

#include <Eigen/Dense>

namespace crnzero {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Orthonormal bases of a subspace D of R^n and of its orthogonal complement.
/// Columns of `d_basis` span D, columns of `dperp_basis` span D⊥; together they
/// form an orthonormal basis of R^n.
struct StoichBasis {
  Matrix d_basis;
  Matrix dperp_basis;

  [[nodiscard]] Index ambient_dim() const { return d_basis.rows(); }
  [[nodiscard]] Index dim() const { return d_basis.cols(); }
  [[nodiscard]] Index codim() const { return dperp_basis.cols(); }

  /// Orthogonal projections onto D and D⊥.
  [[nodiscard]] Vector project_d(const Vector& v) const;
  [[nodiscard]] Vector project_dperp(const Vector& v) const;
};

struct SplitOptions {
  /// A generator whose residual after orthogonalization is below
  /// tol * (largest generator norm) counts as dependent.
  double dependence_tol = 1e-9;
  /// Dependent generators are dropped when true, rejected otherwise.
  bool drop_dependent = false;
};

/// Orthonormalizes the columns of `generators` (n rows) in order by modified
/// Gram-Schmidt with one re-orthogonalization pass, then completes the basis of
/// R^n with pivoted standard basis vectors. Deterministic given input order.
/// Throws NumericalError on a dependent generator unless drop_dependent is set.
StoichBasis orthonormal_split(const Matrix& generators, Index ambient_dim,
                              const SplitOptions& opts = {});

/// Rank by Gaussian elimination with partial pivoting; pivots below
/// rel_tol * max|entry| are treated as zero.
Index numerical_rank(const Matrix& m, double rel_tol = 1e-9);

}  // namespace crnzero
