#pragma once

#include <cstdint>
#include <optional>

#include "crnzero/network.hpp"

namespace crnzero {

/// Ã: a_ij off the diagonal, diagonal j equal to minus the off-diagonal sum of
/// column j, so every column sums to zero.
Matrix a_tilde(const Network& net);

struct KernelVector {
  /// Strictly positive, unit 1-norm.
  Vector y_bar;
  /// ‖Ã y_bar‖∞.
  double residual = 0.0;
  std::size_t iterations = 0;
};

struct KernelOptions {
  std::size_t max_iterations = 2'000'000;
  /// Required residual, relative to 1 + ‖Ã‖∞.
  double tol = 1e-12;
  /// Starting vector; uniform when empty. Must be strictly positive.
  Vector initial;
};

/// Power iteration on Ã + γI with γ = 1 + max_j Σ_{i≠j} a_ij. Throws
/// NumericalError if the residual bound is not reached within the cap.
KernelVector pf_kernel(const Network& net, const KernelOptions& opts = {});

struct EquilibriumResult {
  Vector x_bar;
  double field_residual = 0.0;
  /// ‖P_{D⊥}(x̄ − p)‖∞: distance of x̄ from the class through p.
  double class_residual = 0.0;
  /// ‖P_D(ρ(x̄) − ρ(q))‖∞ against the reference equilibrium q.
  double log_residual = 0.0;
  std::size_t iterations = 0;
  /// Anchor actually used (replaced by a strictly positive point if needed).
  Vector anchor;
};

/// x̄ with Θ_B(x̄) = ȳ, from the minimum-norm solution z = B(B'B)⁻¹ ln ȳ of
/// B'z = ln ȳ and x̄_i = ρ⁻¹(z_i).
EquilibriumResult some_positive_equilibrium(const Network& net, const KernelOptions& opts = {});

struct CoordinatizeOptions {
  /// Gradient stop, relative to 1 + ‖p‖∞.
  double gradient_tol = 1e-12;
  std::size_t max_iterations = 200;
  double armijo = 1e-4;
  /// Hessian solves with a reciprocal condition estimate below this fall
  /// back to a gradient step.
  double min_rcond = 1e-14;
  /// Residuals above this after the iteration are reported as failure.
  double residual_tol = 1e-10;
  /// Starting coordinates (length codim); zero, i.e. x = q, when empty.
  Vector initial;
};

struct CoordinatizeResult {
  Vector x;
  /// ‖P_{D⊥}(x − p)‖∞.
  double class_residual = 0.0;
  /// ‖P_D(ρ(x) − ρ(q))‖∞.
  double log_residual = 0.0;
  std::size_t iterations = 0;
  std::size_t gradient_steps = 0;
};

/// The unique x > 0 with x − p ∈ D and ρ(x) − ρ(q) ∈ D⊥, where D is spanned
/// by basis.d_basis. Writes ρ(x) − ρ(q) = V y (V the dperp basis) and
/// minimizes Σ_i L_i((Vy)_i), L_i(t) = p·q_i·e^{t/p} − p_i·t, by damped Newton.
/// Throws StructureError for non-positive p or q, NumericalError when the
/// line search stalls or the residuals miss residual_tol.
CoordinatizeResult coordinatize(const StoichBasis& basis, const Vector& p, const Vector& q,
                                const Kinetics& kinetics, const CoordinatizeOptions& opts = {});

struct ClassEquilibriumOptions {
  CoordinatizeOptions coordinatize;
  KernelOptions kernel;
  /// Required ‖f(x̄_S)‖∞.
  double field_tol = 1e-9;
  /// Smallest acceptable min_i x_i for a replacement anchor.
  double positivity_tol = 1e-9;
};

/// A strictly positive point of the class maximizing min_i x_i (capped at
/// max(1, ‖anchor‖∞)). Throws ClassNotPositive if the class has none.
Vector positive_class_point(const StoichBasis& basis, const ClassDescriptor& cls,
                            double positivity_tol = 1e-9);

/// x̄_S = coordinatize(D, p, x̄) where p is a strictly positive class point and
/// x̄ = some_positive_equilibrium. Throws ClassNotPositive or NumericalError.
EquilibriumResult class_equilibrium(const Network& net, const ClassDescriptor& cls,
                                    const ClassEquilibriumOptions& opts = {});

}  // namespace crnzero
