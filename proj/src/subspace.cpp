#include "crnzero/subspace.hpp"

#include <cmath>
#include <string>

#include "crnzero/errors.hpp"

namespace crnzero {

Vector StoichBasis::project_d(const Vector& v) const {
  return d_basis * (d_basis.transpose() * v);
}

Vector StoichBasis::project_dperp(const Vector& v) const {
  return dperp_basis * (dperp_basis.transpose() * v);
}

namespace {

// Two sweeps of modified Gram-Schmidt against the first `count` columns of q.
void orthogonalize(const Matrix& q, Index count, Vector& v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index k = 0; k < count; ++k) {
      v -= q.col(k).dot(v) * q.col(k);
    }
  }
}

}  // namespace

StoichBasis orthonormal_split(const Matrix& generators, Index ambient_dim,
                              const SplitOptions& opts) {
  const Index n = ambient_dim;
  if (generators.cols() > 0 && generators.rows() != n) {
    throw StructureError("orthonormal_split: generator dimension mismatch");
  }
  Matrix q(n, n);
  Index count = 0;

  double scale = 0.0;
  for (Index j = 0; j < generators.cols(); ++j) {
    scale = std::max(scale, generators.col(j).norm());
  }

  for (Index j = 0; j < generators.cols(); ++j) {
    Vector v = generators.col(j);
    orthogonalize(q, count, v);
    const double r = v.norm();
    if (r <= opts.dependence_tol * scale || r == 0.0) {
      if (opts.drop_dependent) continue;
      throw NumericalError("orthonormal_split: generator " + std::to_string(j) +
                           " is numerically dependent");
    }
    q.col(count++) = v / r;
  }
  const Index span_dim = count;

  // Complete with the standard basis vector of largest residual at each step;
  // the largest residual norm is at least 1/sqrt(n).
  while (count < n) {
    double best_norm = -1.0;
    Vector best_v;
    for (Index k = 0; k < n; ++k) {
      Vector e = Vector::Unit(n, k);
      orthogonalize(q, count, e);
      const double r = e.norm();
      if (r > best_norm + 1e-14) {
        best_norm = r;
        best_v = e;
      }
    }
    q.col(count++) = best_v / best_norm;
  }

  StoichBasis out;
  out.d_basis = q.leftCols(span_dim);
  out.dperp_basis = q.rightCols(n - span_dim);
  return out;
}

Index numerical_rank(const Matrix& m, double rel_tol) {
  Matrix a = m;
  const double tol = rel_tol * a.cwiseAbs().maxCoeff();
  if (a.size() == 0 || tol == 0.0) return 0;
  Index rank = 0;
  for (Index col = 0; col < a.cols() && rank < a.rows(); ++col) {
    Index pivot = rank;
    for (Index r = rank + 1; r < a.rows(); ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) <= tol) continue;
    a.row(pivot).swap(a.row(rank));
    for (Index r = rank + 1; r < a.rows(); ++r) {
      const double factor = a(r, col) / a(rank, col);
      a.row(r) -= factor * a.row(rank);
    }
    ++rank;
  }
  return rank;
}

}  // namespace crnzero
