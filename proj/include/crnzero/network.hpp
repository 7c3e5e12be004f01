#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "crnzero/subspace.hpp"

namespace crnzero {

/// The power family θ(y) = |y|^p with p > 0, together with the derived
/// ρ = ln θ, its inverse, and the antiderivative of ρ anchored at 1.
struct Kinetics {
  double exponent = 1.0;

  [[nodiscard]] double theta(double y) const;
  /// p·ln y; -inf at y = 0.
  [[nodiscard]] double rho(double y) const;
  [[nodiscard]] double rho_inverse(double s) const;
  /// ∫_1^r ρ(s) ds = p (r ln r − r + 1), with 0·ln 0 = 0.
  [[nodiscard]] double rho_integral(double r) const;
  [[nodiscard]] Vector rho(const Vector& x) const;
};

/// A mass-action network given by the rate matrix A (m×m, a_ij is the rate of
/// the reaction from complex j to complex i) and the complex matrix B (n×m,
/// column j is the stoichiometry of complex j). Immutable after construction.
class Network {
 public:
  /// Throws StructureError on shape mismatch, negative or non-finite entries,
  /// or a non-positive kinetics exponent.
  Network(std::vector<std::string> species_names,
          std::vector<std::string> complex_names, Matrix rates,
          Matrix complexes, Kinetics kinetics = {});

  /// Default names X1..Xn and c1..cm.
  Network(Matrix rates, Matrix complexes, Kinetics kinetics = {});

  [[nodiscard]] const std::vector<std::string>& species_names() const { return species_; }
  [[nodiscard]] const std::vector<std::string>& complex_names() const { return complex_names_; }
  [[nodiscard]] const Matrix& rates() const { return a_; }
  [[nodiscard]] const Matrix& complexes() const { return b_; }
  [[nodiscard]] const Kinetics& kinetics() const { return kinetics_; }
  [[nodiscard]] Index num_species() const { return b_.rows(); }
  [[nodiscard]] Index num_complexes() const { return b_.cols(); }

  friend bool operator==(const Network& lhs, const Network& rhs);

 private:
  std::vector<std::string> species_;
  std::vector<std::string> complex_names_;
  Matrix a_;
  Matrix b_;
  Kinetics kinetics_;
};

struct SubOneEntry {
  Index row;
  Index col;
  double value;
  friend bool operator==(const SubOneEntry&, const SubOneEntry&) = default;
};

struct ValidationReport {
  bool irreducible = false;
  Index rank_b = 0;
  Index num_complexes = 0;
  std::vector<Index> zero_rows;
  std::vector<SubOneEntry> sub_one_entries;
  double rank_tol = 0.0;

  [[nodiscard]] bool overall() const {
    return irreducible && rank_b == num_complexes && zero_rows.empty() &&
           sub_one_entries.empty();
  }
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct ValidationOptions {
  double rank_tol = 1e-9;
};

/// Checks irreducibility of A (strong connectivity of j→i for a_ij > 0, i≠j),
/// rank B = m, no zero row of B, and every entry of B either 0 or ≥ 1.
ValidationReport validate_network(const Network& net, const ValidationOptions& opts = {});

/// True iff every node of the directed graph of `rates` reaches, and is
/// reached from, node 0. Diagonal entries are ignored.
bool strongly_connected(const Matrix& rates);

/// Orthonormal bases of D = span{b_1 − b_j} and D⊥. Throws NumericalError if the
/// differences are dependent at tolerance (B not of rank m).
StoichBasis stoich_basis(const Network& net, double dependence_tol = 1e-9);

/// A class (p + D) ∩ R^n_{≥0}, represented by its conservation values
/// ⟨v_ℓ, p⟩ over the dperp basis vectors.
struct ClassDescriptor {
  Vector conservation_values;
  Vector anchor_point;
};

/// Throws StructureError if p has a negative component or wrong dimension.
ClassDescriptor class_of(const StoichBasis& basis, const Vector& p);
ClassDescriptor class_of(const Network& net, const Vector& p);

/// Parses the line-oriented network format:
///
///   species <name> <name> ...
///   complex <cname> = <k>*<species> + ...
///   rate <cname> -> <cname> : <positive real>
///   kinetics exponent <positive real>
///
/// '#' starts a comment. Throws ParseError with the line number.
Network parse_network(std::string_view text);
Network load_network(const std::string& path);

/// Emits the grammar accepted by parse_network; numbers use the shortest
/// representation that round-trips.
std::string serialize_network(const Network& net);

/// Shortest round-trip decimal representation.
std::string format_real(double v);

}  // namespace crnzero
