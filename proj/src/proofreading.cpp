#include "crnzero/proofreading.hpp"

#include <cmath>
#include <string>

#include "crnzero/errors.hpp"

namespace crnzero {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw StructureError(std::string(what) + " must be positive");
}

}  // namespace

void ProofreadingRates::validate() const {
  if (n < 0) throw StructureError("chain length must be nonnegative");
  if (k_minus.size() != static_cast<std::size_t>(n) + 1) throw StructureError("need N+1 dissociation rates");
  if (k_p.size() != static_cast<std::size_t>(n)) throw StructureError("need N modification rates");
  require_positive(k1, "k1");
  for (double k : k_minus) require_positive(k, "dissociation rate");
  for (double k : k_p) require_positive(k, "modification rate");
}

Network build_mckeithan(const ProofreadingRates& rates) {
  rates.validate();
  const Index chain = rates.n + 1;
  const Index species = chain + 2;
  const Index m = chain + 1;
  std::vector<std::string> species_names{"T", "M"};
  std::vector<std::string> complex_names{"TM"};
  for (Index i = 0; i < chain; ++i) {
    species_names.push_back("C" + std::to_string(i));
    complex_names.push_back("C" + std::to_string(i));
  }
  Matrix b = Matrix::Zero(species, m);
  b(0, 0) = 1.0;
  b(1, 0) = 1.0;
  for (Index j = 1; j < m; ++j) b(j + 1, j) = 1.0;

  // 0-based: a(1,0) = k1, a(0,j) = k_{-1,j-1}, a(j,j-1) = k_{p,j-2}.
  Matrix a = Matrix::Zero(m, m);
  a(1, 0) = rates.k1;
  for (Index j = 1; j < m; ++j) a(0, j) = rates.k_minus[static_cast<std::size_t>(j - 1)];
  for (Index j = 2; j < m; ++j) a(j, j - 1) = rates.k_p[static_cast<std::size_t>(j - 2)];
  return Network(std::move(species_names), std::move(complex_names), std::move(a), std::move(b));
}

ClassDescriptor proofreading_class(const Network& net, double t_star, double m_star) {
  require_positive(t_star, "T*");
  require_positive(m_star, "M*");
  Vector anchor = Vector::Zero(net.num_species());
  anchor[0] = t_star;
  anchor[1] = m_star;
  return class_of(net, anchor);
}

Vector reduced_field(const ProofreadingRates& rates, double t_star, double m_star, const Vector& c) {
  rates.validate();
  const Index chain = rates.n + 1;
  if (c.size() != chain) throw StructureError("reduced state must have N+1 components");
  const double total = c.sum();
  const double t = t_star - total;
  const double m = m_star - total;
  Vector out(chain);
  for (Index i = 0; i < chain; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double inflow = i == 0 ? rates.k1 * t * m : rates.k_p[u - 1] * c[i - 1];
    const double onward = i < rates.n ? rates.k_p[u] : 0.0;
    out[i] = inflow - (rates.k_minus[u] + onward) * c[i];
  }
  return out;
}

}  // namespace crnzero
