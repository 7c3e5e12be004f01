#include "crnzero/boundary.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "crnzero/dynamics.hpp"
#include "crnzero/errors.hpp"

namespace crnzero {

SupportSets support_sets(const Network& net) {
  const Matrix& b = net.complexes();
  SupportSets sets(static_cast<std::size_t>(b.cols()));
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index k = 0; k < b.rows(); ++k) {
      if (b(k, j) > 0.0) sets[static_cast<std::size_t>(j)].push_back(k);
    }
  }
  return sets;
}

const char* to_string(BoundaryStatus status) {
  switch (status) {
    case BoundaryStatus::kInterior:
      return "interior";
    case BoundaryStatus::kBoundaryEquilibrium:
      return "boundary_equilibrium";
    case BoundaryStatus::kBoundaryNonEquilibrium:
      return "boundary_non_equilibrium";
  }
  return "unknown";
}

BoundaryStatus boundary_status(const Network& net, const Vector& x, bool cross_check) {
  if (x.size() != net.num_species()) throw StructureError("state has wrong dimension");
  bool interior = true;
  for (Index k = 0; k < x.size(); ++k) {
    if (!(x[k] >= 0.0)) throw StructureError("state has a negative component");
    if (x[k] == 0.0) interior = false;
  }
  if (interior) return BoundaryStatus::kInterior;

  bool every_hit = true;
  for (const auto& s : support_sets(net)) {
    if (std::none_of(s.begin(), s.end(), [&](Index k) { return x[k] == 0.0; })) {
      every_hit = false;
      break;
    }
  }
  if (cross_check) {
    const bool monomials_vanish = monomials(net, x).cwiseAbs().maxCoeff() == 0.0;
    const bool field_vanishes = vector_field(net, x).cwiseAbs().maxCoeff() <= 1e-12;
    if (monomials_vanish != every_hit || field_vanishes != every_hit) {
      throw NumericalError("boundary_status: support-set, monomial and field tests disagree");
    }
  }
  return every_hit ? BoundaryStatus::kBoundaryEquilibrium : BoundaryStatus::kBoundaryNonEquilibrium;
}

bool is_boundary_equilibrium(const Network& net, const Vector& x, bool cross_check) {
  return boundary_status(net, x, cross_check) == BoundaryStatus::kBoundaryEquilibrium;
}

namespace {

class HittingSearch {
 public:
  HittingSearch(const SupportSets& sets, Index n, std::size_t cap)
      : sets_(sets), order_(sets.size()), chosen_(static_cast<std::size_t>(n), false), cap_(cap) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return sets_[a].size() < sets_[b].size(); });
    for (const auto& s : sets_) {
      if (s.empty()) throw StructureError("minimal_hitting_sets: empty support set");
      for (Index k : s) {
        if (k < 0 || k >= n) throw StructureError("minimal_hitting_sets: species index out of range");
      }
    }
  }

  std::vector<std::vector<Index>> run() {
    search();
    std::vector<std::vector<Index>> out(found_.begin(), found_.end());
    return out;
  }

 private:
  [[nodiscard]] bool hits(const std::vector<Index>& s) const {
    return std::any_of(s.begin(), s.end(), [&](Index k) { return chosen_[static_cast<std::size_t>(k)]; });
  }

  [[nodiscard]] bool contains_found() const {
    for (const auto& f : found_) {
      if (std::all_of(f.begin(), f.end(), [&](Index k) { return chosen_[static_cast<std::size_t>(k)]; })) {
        return true;
      }
    }
    return false;
  }

  [[nodiscard]] bool minimal() {
    for (Index k : current_) {
      chosen_[static_cast<std::size_t>(k)] = false;
      const bool still = std::all_of(sets_.begin(), sets_.end(), [&](const auto& s) { return hits(s); });
      chosen_[static_cast<std::size_t>(k)] = true;
      if (still) return false;
    }
    return true;
  }

  void search() {
    if (++nodes_ > cap_) throw NumericalError("minimal_hitting_sets: search exceeds pattern cap");
    if (contains_found()) return;
    const std::vector<Index>* open = nullptr;
    for (std::size_t j : order_) {
      if (!hits(sets_[j])) {
        open = &sets_[j];
        break;
      }
    }
    if (open == nullptr) {
      if (minimal()) {
        std::vector<Index> z = current_;
        std::sort(z.begin(), z.end());
        found_.insert(std::move(z));
      }
      return;
    }
    for (Index k : *open) {
      chosen_[static_cast<std::size_t>(k)] = true;
      current_.push_back(k);
      search();
      current_.pop_back();
      chosen_[static_cast<std::size_t>(k)] = false;
    }
  }

  const SupportSets& sets_;
  std::vector<std::size_t> order_;
  std::vector<bool> chosen_;
  std::vector<Index> current_;
  std::set<std::vector<Index>> found_;
  std::size_t cap_;
  std::size_t nodes_ = 0;
};

}  // namespace

std::vector<std::vector<Index>> minimal_hitting_sets(const SupportSets& sets, Index num_species,
                                                     std::size_t cap) {
  return HittingSearch(sets, num_species, cap).run();
}

BoundaryAnalysis class_boundary_check(const Network& net, const ClassDescriptor& cls,
                                      const BoundaryOptions& opts) {
  const StoichBasis basis = stoich_basis(net);
  if (cls.conservation_values.size() != basis.codim()) {
    throw StructureError("class descriptor does not match the network");
  }
  const Index n = net.num_species();
  const auto patterns = minimal_hitting_sets(support_sets(net), n, opts.pattern_cap);
  BoundaryAnalysis out;
  out.patterns_enumerated = patterns.size();
  FeasibilityProblem problem{basis.dperp_basis.transpose(), cls.conservation_values,
                             std::vector<bool>(static_cast<std::size_t>(n), false)};
  for (const auto& z : patterns) {
    ++out.zero_patterns_checked;
    std::fill(problem.fixed_zero.begin(), problem.fixed_zero.end(), false);
    for (Index k : z) problem.fixed_zero[static_cast<std::size_t>(k)] = true;
    auto x = linear_feasibility(problem, opts.lp);
    if (!x) continue;
    out.has_boundary_equilibria = true;
    out.witness = std::move(x);
    out.witness_pattern = z;
    break;
  }
  return out;
}

}  // namespace crnzero
