#pragma once

#include <cstdint>
#include <optional>

#include "crnzero/boundary.hpp"
#include "crnzero/dynamics.hpp"
#include "crnzero/network.hpp"

namespace crnzero {

/// W(x, z) = Σ_i [∫_1^{x_i} ρ − x_i ρ(z_i)] for x ≥ 0, z > 0.
double entropy_W(const Vector& x, const Vector& z, const Kinetics& kinetics);

/// ∂W/∂x = ρ(x) − ρ(z) at interior x.
Vector entropy_W_gradient(const Vector& x, const Vector& z, const Kinetics& kinetics);

/// V(x) = W(x, x̄) − W(x̄, x̄), evaluated as Σ p (x_i ln(x_i/x̄_i) − x_i + x̄_i).
double lyapunov_V(const Vector& x, const Vector& x_bar, const Kinetics& kinetics);

/// δ(x, z) = Σ_i Σ_j ⟨b_i − b_j, ρ(x) − ρ(z)⟩²; x, z > 0.
double delta(const Network& net, const Vector& x, const Vector& z);

/// Δ(x, z) = Σ_i ⟨b_i − b_1, ρ(x) − ρ(z)⟩² + Σ_ℓ ⟨v_ℓ, x − z⟩² over the dperp basis.
double separation_Delta(const Network& net, const StoichBasis& basis, const Vector& x, const Vector& z);
double separation_Delta(const Network& net, const Vector& x, const Vector& z);

/// Q(η) = Σ_i Σ_j a_ij (η_i − η_j)².
double quadratic_Q(const Network& net, const Vector& eta);

struct KappaBound {
  /// Smallest eigenvalue of the matrix M of P(ξ) = ξ'Mξ.
  double kappa0 = 0.0;
  /// kappa0 / (4m).
  double kappa = 0.0;
  /// Smallest Q(q) / (κ ΣΣ(q_i − q_j)²) over the probes.
  double sample_check = 0.0;
  std::size_t probes = 0;
  std::size_t violations = 0;
  Matrix form;
};

/// The symmetric matrix M with P(ξ) = ξ'Mξ in the m−1 variables ξ_i = η_i − η_m.
Matrix kappa_form(const Network& net);

/// κ0 from the symmetric eigensolver, κ = κ0/(4m), then `probes` standard
/// normal vectors q checked against Q(q) ≥ κ ΣΣ(q_i − q_j)². For m = 1 the
/// bound is vacuous and κ0 = κ = 1. Throws NumericalError if κ0 ≤ tol.
KappaBound kappa_bound(const Network& net, std::size_t probes = 100000, std::uint64_t seed = 0,
                       double tol = 1e-12);

/// Largest value of e^a(r−a) − e^r + e^a + (r−a)²/2 over `probes` random pairs
/// with a uniform in (0, a_max] and r uniform in [0, r_max].
double scalar_inequality_probe(std::size_t probes, std::uint64_t seed, double a_max = 10.0,
                               double r_max = 20.0);

/// c(z) = κ min_j Θ_j(z) / 2.
double c_of(const Network& net, double kappa, const Vector& z);
double c_of(const Network& net, const Vector& z);

struct CertificateOptions {
  double slack = 1e-8;
  /// Precomputed κ; computed with default probes when absent.
  std::optional<double> kappa;
};

struct CertificateReport {
  std::size_t checked_points = 0;
  std::size_t skipped_boundary = 0;
  /// max(decrease_violation, monotonicity_violation).
  double max_violation = 0.0;
  double c_used = 0.0;
  bool pass = false;
  /// Largest ⟨ρ(x) − ρ(x̄), f(x)⟩ + c δ(x, x̄) over interior samples.
  double decrease_violation = 0.0;
  /// Largest V(x_{k+1}) − V(x_k) over consecutive samples.
  double monotonicity_violation = 0.0;
  /// Sample index attaining decrease_violation.
  std::size_t worst_index = 0;
};

/// Checks ⟨ρ(x) − ρ(x̄), f(x)⟩ + c δ(x, x̄) ≤ slack at every interior sample
/// and V(x_{k+1}) ≤ V(x_k) + slack along the trajectory. Both maxima are
/// reported as computed, so they are usually negative.
CertificateReport decrease_certificate(const Network& net, const Vector& x_bar, const Trajectory& traj,
                                       const CertificateOptions& opts = {});

/// Fills traj.lyapunov with V and traj.deviation with δ(x, x̄) (NaN at boundary samples).
void annotate_lyapunov(const Network& net, const Vector& x_bar, Trajectory& traj);

struct AttractionLevel {
  /// min of V over the boundary equilibria of the class; +inf when there are none.
  double w0 = 0.0;
  std::optional<Vector> minimizer;
  std::vector<Index> pattern;
};

/// Minimizes V over each face {x in the class, x_Z = 0} for the minimal hitting
/// sets Z, reusing the coordinatization on the face's free coordinates.
AttractionLevel attraction_level(const Network& net, const ClassDescriptor& cls, const Vector& x_bar,
                                 const BoundaryOptions& opts = {});

}  // namespace crnzero
