#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "crnzero/proofreading.hpp"
#include "crnzero/subspace.hpp"

namespace crnzero::testing {

/// Solves M y = r by Gaussian elimination with partial pivoting.
inline Vector gauss_solve(Matrix m, Vector r) {
  const Index n = m.rows();
  for (Index col = 0; col < n; ++col) {
    Index piv = col;
    for (Index i = col + 1; i < n; ++i) {
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    }
    if (m(piv, col) == 0.0) throw std::runtime_error("gauss_solve: singular");
    if (piv != col) {
      m.row(piv).swap(m.row(col));
      std::swap(r[piv], r[col]);
    }
    for (Index i = col + 1; i < n; ++i) {
      const double f = m(i, col) / m(col, col);
      if (f == 0.0) continue;
      for (Index j = col; j < n; ++j) m(i, j) -= f * m(col, j);
      r[i] -= f * r[col];
    }
  }
  Vector y(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = r[i];
    for (Index j = i + 1; j < n; ++j) s -= m(i, j) * y[j];
    y[i] = s / m(i, i);
  }
  return y;
}

/// Kernel of a rank m−1 matrix with zero column sums, normalized to unit
/// 1-norm: one equation of Ãy = 0 is replaced by Σ y_i = 1.
inline Vector elimination_kernel(const Matrix& a_tilde) {
  const Index m = a_tilde.rows();
  Matrix sys = a_tilde;
  sys.row(m - 1).setOnes();
  Vector rhs = Vector::Zero(m);
  rhs[m - 1] = 1.0;
  return gauss_solve(sys, rhs);
}

/// The chain equations written out term by term in (T, M, C_0..C_N).
inline Vector proofreading_field_direct(const ProofreadingRates& r, const Vector& x) {
  const int n = r.n;
  const double t = x[0];
  const double m = x[1];
  Vector f(n + 3);
  double back = 0.0;
  for (int i = 0; i <= n; ++i) back += r.k_minus[static_cast<std::size_t>(i)] * x[i + 2];
  f[0] = -r.k1 * t * m + back;
  f[1] = -r.k1 * t * m + back;
  for (int i = 0; i <= n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double in = i == 0 ? r.k1 * t * m : r.k_p[u - 1] * x[i + 1];
    const double onward = i < n ? r.k_p[u] : 0.0;
    f[i + 2] = in - (r.k_minus[u] + onward) * x[i + 2];
  }
  return f;
}

}  // namespace crnzero::testing
