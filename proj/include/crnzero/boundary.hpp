#pragma once

#include <optional>
#include <vector>

#include "crnzero/network.hpp"
#include "crnzero/simplex.hpp"

namespace crnzero {

/// For each complex j, the sorted species indices k with b_kj > 0.
using SupportSets = std::vector<std::vector<Index>>;

SupportSets support_sets(const Network& net);

enum class BoundaryStatus { kInterior, kBoundaryEquilibrium, kBoundaryNonEquilibrium };

const char* to_string(BoundaryStatus status);

/// kInterior when x > 0; otherwise whether every support set contains a zero
/// coordinate of x. With `cross_check`, also verifies that this agrees with
/// all monomials vanishing and with ‖f(x)‖∞ ≤ 1e-12 (NumericalError if not).
/// Throws StructureError on a negative component.
BoundaryStatus boundary_status(const Network& net, const Vector& x, bool cross_check = false);

/// True only for kBoundaryEquilibrium.
bool is_boundary_equilibrium(const Network& net, const Vector& x, bool cross_check = false);

/// Inclusion-minimal Z ⊆ {0..n-1} meeting every support set, each sorted, in
/// lexicographic order. Throws NumericalError when the number of search nodes
/// exceeds `cap`.
std::vector<std::vector<Index>> minimal_hitting_sets(const SupportSets& sets, Index num_species,
                                                     std::size_t cap = 1'000'000);

struct BoundaryOptions {
  std::size_t pattern_cap = 1'000'000;
  LpOptions lp;
};

struct BoundaryAnalysis {
  bool has_boundary_equilibria = false;
  std::optional<Vector> witness;
  /// Zero pattern of the witness (the first feasible one in lexicographic order).
  std::vector<Index> witness_pattern;
  std::size_t patterns_enumerated = 0;
  std::size_t zero_patterns_checked = 0;
};

/// Decides whether the class contains a boundary equilibrium by testing
/// {x ≥ 0, x_Z = 0, x in the class} for every minimal hitting set Z.
BoundaryAnalysis class_boundary_check(const Network& net, const ClassDescriptor& cls,
                                      const BoundaryOptions& opts = {});

}  // namespace crnzero
