#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "crnzero/network.hpp"
#include "crnzero/proofreading.hpp"

namespace crnzero::testing {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// A network satisfying all structural hypotheses: n in [2, 6], m in [2, n],
/// B with entries in {0, 1, 2}, A strongly connected through a random cycle
/// plus extra edges.
inline Network random_network(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(2, 6);
  const int n = pick_n(rng);
  std::uniform_int_distribution<int> pick_m(2, n);
  const int m = pick_m(rng);
  std::uniform_int_distribution<int> entry(0, 2);
  std::bernoulli_distribution sparse(0.5);
  Matrix b(n, m);
  for (;;) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < m; ++j) b(k, j) = sparse(rng) ? 0.0 : entry(rng);
    }
    bool zero_row = false;
    for (int k = 0; k < n; ++k) zero_row = zero_row || b.row(k).cwiseAbs().maxCoeff() == 0.0;
    if (!zero_row && numerical_rank(b) == m) break;
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix a = Matrix::Zero(m, m);
  for (int s = 0; s < m; ++s) {
    const int from = order[static_cast<std::size_t>(s)];
    const int to = order[static_cast<std::size_t>((s + 1) % m)];
    a(to, from) = log_uniform(rng, 0.2, 5.0);
  }
  std::bernoulli_distribution extra(0.3);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j && a(i, j) == 0.0 && extra(rng)) a(i, j) = log_uniform(rng, 0.2, 5.0);
    }
  }
  return Network(a, b);
}

inline Vector random_positive(std::mt19937_64& rng, Index n, double lo = 0.2, double hi = 5.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = log_uniform(rng, lo, hi);
  return v;
}

inline ProofreadingRates random_proofreading_rates(int n, std::mt19937_64& rng) {
  ProofreadingRates r;
  r.n = n;
  r.k1 = log_uniform(rng, 0.2, 5.0);
  r.k_minus.clear();
  for (int i = 0; i <= n; ++i) r.k_minus.push_back(log_uniform(rng, 0.2, 5.0));
  for (int i = 0; i < n; ++i) r.k_p.push_back(log_uniform(rng, 0.2, 5.0));
  return r;
}

/// Random strictly positive point of the proofreading class (T*, M*): a total
/// bound mass s·min(T*, M*) split over C_0..C_N with Dirichlet(1) weights.
inline Vector random_proofreading_state(int n, double t_star, double m_star, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::exponential_distribution<double> e(1.0);
  const double total = u(rng) * std::min(t_star, m_star);
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  double sum = 0.0;
  for (double& x : w) sum += (x = e(rng));
  Vector x(n + 3);
  x[0] = t_star - total;
  x[1] = m_star - total;
  for (int i = 0; i <= n; ++i) x[i + 2] = total * w[static_cast<std::size_t>(i)] / sum;
  return x;
}

}  // namespace crnzero::testing
