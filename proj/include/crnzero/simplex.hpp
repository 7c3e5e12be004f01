#pragma once

#include <optional>

#include "crnzero/subspace.hpp"

namespace crnzero {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct LpOptions {
  /// Pivot and reduced-cost tolerance.
  double tol = 1e-9;
  std::size_t max_pivots = 100000;
};

/// Dense two-phase simplex with Bland's rule for
///   minimize c'x  subject to  A x = b, x >= 0.
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& opts = {});

/// Equality constraints A x = b with x >= 0 and x_k = 0 for every k with
/// fixed_zero[k] set (fixed_zero may be empty).
struct FeasibilityProblem {
  Matrix a;
  Vector b;
  std::vector<bool> fixed_zero;
};

/// A feasible point refined by one least-squares projection onto the
/// equalities over its free coordinates, or nullopt if infeasible.
std::optional<Vector> linear_feasibility(const FeasibilityProblem& problem, const LpOptions& opts = {});

struct MaxMinResult {
  Vector x;
  /// min over the free coordinates of x.
  double min_value = 0.0;
};

/// Maximizes min_i x_i over the free coordinates subject to the same
/// constraints, with the minimum capped at `cap`. nullopt if infeasible.
std::optional<MaxMinResult> maximize_min(const FeasibilityProblem& problem, double cap,
                                         const LpOptions& opts = {});

}  // namespace crnzero
