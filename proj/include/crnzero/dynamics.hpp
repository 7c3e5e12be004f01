#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "crnzero/network.hpp"

namespace crnzero {

/// Θ_B(x): component j is Π_k θ(x_k)^{b_kj}, with r^0 = 1 and 0^c = 0 for c > 0.
Vector monomials(const Network& net, const Vector& x);

/// f(x) = B Ã Θ_B(x). With `cross_check` the double-sum form is evaluated too
/// and a NumericalError is thrown unless both agree to 1e-12 relative to
/// field_term_scale.
Vector vector_field(const Network& net, const Vector& x, bool cross_check = false);

/// f(x) = Σ_i Σ_j a_ij θ(x_1)^{b_1j}⋯θ(x_n)^{b_nj} (b_i − b_j).
Vector vector_field_double_sum(const Network& net, const Vector& x);

/// f(x) = Σ_i Σ_j a_ij e^{⟨b_j, ρ(x)⟩} (b_i − b_j), with e^{0·(−∞)} taken as 1.
Vector vector_field_exponential(const Network& net, const Vector& x);

/// Σ_{i≠j} a_ij Θ_j(x) ‖b_i − b_j‖∞: the magnitude of the terms summed in f,
/// used to make cancellation-sensitive comparisons relative.
double field_term_scale(const Network& net, const Vector& x);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Splits f_k(x) = α_k(x) θ(x_k) + β_k(x), where α_k collects complexes with
/// b_kj ≥ 1 and β_k ≥ 0 those with b_kj = 0. Requires every entry of B to be 0
/// or ≥ 1 (StructureError otherwise).
AlphaBeta alpha_beta(const Network& net, const Vector& x, Index k);

/// Sparse evaluator for repeated calls to f on one network. Holds no mutable
/// state; the caller supplies the scratch vector.
class FieldEvaluator {
 public:
  /// With `polynomial_extension`, integer powers keep the sign of negative
  /// arguments, so the field stays smooth across the orthant boundary.
  explicit FieldEvaluator(const Network& net, bool polynomial_extension = false);

  [[nodiscard]] Index num_species() const { return n_; }
  [[nodiscard]] Index num_complexes() const { return m_; }

  void monomials(const Vector& x, Vector& out) const;
  /// out = f(x); `scratch` is resized to m as needed.
  void evaluate(const Vector& x, Vector& out, Vector& scratch) const;
  [[nodiscard]] Vector operator()(const Vector& x) const;

 private:
  struct Factor {
    Index species;
    double power;
    int integer_power;  // > 0 when power is a small integer
  };
  struct Entry {
    Index index;
    double value;
  };

  Index n_;
  Index m_;
  bool polynomial_extension_;
  std::vector<std::vector<Factor>> factors_;   // per complex
  std::vector<std::vector<Entry>> inflow_;     // per complex i: (j, a_ij), j ≠ i
  std::vector<double> outflow_;                // per complex j: Σ_{i≠j} a_ij
  std::vector<std::vector<Entry>> b_columns_;  // per complex: nonzero (k, b_kj)
};

// --- integration ---------------------------------------------------------------

enum class Method { kRK45, kRK4 };

struct SimOptions {
  Method method = Method::kRK45;
  double t_end = 1.0;
  /// First step for RK45 (0 selects one automatically); fixed step for RK4
  /// (0 means t_end / 1000).
  double initial_step = 0.0;
  double max_step = std::numeric_limits<double>::infinity();
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  /// Components in [−eps_neg, 0) after a step are clamped to 0.
  double eps_neg = 1e-12;
  /// Step underflow threshold, relative to max(1, |t|).
  double min_step = 1e-14;
  std::size_t max_steps = 50'000'000;
  /// Extra sample times in (0, t_end], filled by cubic Hermite interpolation.
  std::vector<double> output_times;
};

/// Time-stamped states with per-sample diagnostics. `dense[k]` marks samples
/// produced by interpolation rather than by an accepted step.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> drift;
  std::vector<bool> dense;
  /// Filled by annotate_lyapunov; empty otherwise.
  std::vector<double> lyapunov;
  std::vector<double> deviation;

  /// Smallest component observed in an accepted state before clamping.
  double min_pre_clamp = 0.0;
  /// Largest magnitude removed by clamping.
  double max_clamp = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t negativity_rejections = 0;
  std::size_t field_evaluations = 0;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] const Vector& final_state() const { return states.back(); }
  [[nodiscard]] double max_drift() const;
};

using OdeRhs = std::function<void(const Vector& x, Vector& dxdt)>;

/// Plain integration of x' = rhs(x) without nonnegativity handling; drift is
/// measured against the columns of `invariants` (may have zero columns).
Trajectory integrate(const OdeRhs& rhs, const Vector& x0, const SimOptions& opts,
                     const Matrix& invariants = Matrix());

/// Integrates the network from x0 ≥ 0. Clamps roundoff dips in [−eps_neg, 0);
/// RK45 rejects and shrinks a step that would go below −eps_neg, RK4 throws
/// IntegrationError. Drift is measured along the dperp basis.
Trajectory simulate(const Network& net, const Vector& x0, const SimOptions& opts);

}  // namespace crnzero
