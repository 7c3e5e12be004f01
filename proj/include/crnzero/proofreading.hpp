#pragma once

#include <vector>

#include "crnzero/network.hpp"

namespace crnzero {

/// Rate constants of the proofreading chain T + M ⇌ C_0 → C_1 → ⋯ → C_N,
/// each C_i dissociating back to T + M.
struct ProofreadingRates {
  int n = 0;
  double k1 = 1.0;
  /// k_{-1,i}, i = 0..N.
  std::vector<double> k_minus{1.0};
  /// k_{p,i}, i = 0..N-1.
  std::vector<double> k_p;

  /// Throws StructureError on a length mismatch or a non-positive rate.
  void validate() const;
};

/// Species (T, M, C0..CN), complexes TM, C0..CN, a_21 = k1,
/// a_1i = k_{-1,i-2} (i ≥ 2), a_{i,i-1} = k_{p,i-3} (i ≥ 3), 1-based.
Network build_mckeithan(const ProofreadingRates& rates);

/// Class through (T*, M*, 0, …, 0). Throws StructureError unless T*, M* > 0.
ClassDescriptor proofreading_class(const Network& net, double t_star, double m_star);

/// Right-hand side of the chain in the C-variables alone, with T and M
/// eliminated through the conservation laws T + ΣC = T*, M + ΣC = M*.
Vector reduced_field(const ProofreadingRates& rates, double t_star, double m_star, const Vector& c);

}  // namespace crnzero
