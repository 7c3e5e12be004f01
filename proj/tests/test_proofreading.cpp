#include <doctest.h>

#include <cmath>
#include <random>

#include "crnzero/boundary.hpp"
#include "crnzero/dynamics.hpp"
#include "crnzero/equilibria.hpp"
#include "crnzero/errors.hpp"
#include "crnzero/proofreading.hpp"
#include "support/oracles.hpp"
#include "support/random_networks.hpp"

using namespace crnzero;

TEST_SUITE("proofreading") {
  TEST_CASE("association reaction layout") {
    ProofreadingRates r;
    r.k1 = 1.0;
    r.k_minus = {2.0};
    const Network net = build_mckeithan(r);
    CHECK(net.num_species() == 3);
    CHECK(net.num_complexes() == 2);
    Matrix expected(2, 2);
    expected << -1, 2, 1, -2;
    CHECK(a_tilde(net) == expected);
    CHECK(net.species_names() == std::vector<std::string>{"T", "M", "C0"});
  }

  TEST_CASE("rate matrix follows the chain") {
    std::mt19937_64 rng(1);
    const ProofreadingRates r = crnzero::testing::random_proofreading_rates(3, rng);
    const Network net = build_mckeithan(r);
    const Matrix& a = net.rates();
    CHECK(a(1, 0) == r.k1);
    for (int i = 0; i <= 3; ++i) CHECK(a(0, i + 1) == r.k_minus[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 3; ++i) CHECK(a(i + 2, i + 1) == r.k_p[static_cast<std::size_t>(i)]);
    CHECK(validate_network(net).overall());
  }

  TEST_CASE("invalid rates") {
    ProofreadingRates r;
    r.n = 2;
    r.k_minus = {1.0, 1.0};
    r.k_p = {1.0, 1.0};
    CHECK_THROWS_AS(build_mckeithan(r), StructureError);
    r.k_minus = {1.0, 1.0, 1.0};
    r.k_p = {1.0, 0.0};
    CHECK_THROWS_AS(build_mckeithan(r), StructureError);
    r.k_p = {1.0, 1.0};
    r.k1 = -1.0;
    CHECK_THROWS_AS(build_mckeithan(r), StructureError);
  }

  TEST_CASE("class through the totals") {
    std::mt19937_64 rng(2);
    const Network net = build_mckeithan(crnzero::testing::random_proofreading_rates(2, rng));
    const ClassDescriptor cls = proofreading_class(net, 3.0, 5.0);
    Vector anchor = Vector::Zero(5);
    anchor[0] = 3.0;
    anchor[1] = 5.0;
    CHECK(cls.anchor_point == anchor);
    CHECK((class_of(net, anchor).conservation_values - cls.conservation_values).cwiseAbs().maxCoeff() < 1e-15);
    // The bound-mass moves keep both totals.
    const Vector x = crnzero::testing::random_proofreading_state(2, 3.0, 5.0, rng);
    CHECK((class_of(net, x).conservation_values - cls.conservation_values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(proofreading_class(net, 0.0, 1.0), StructureError);
    CHECK_FALSE(class_boundary_check(net, cls).has_boundary_equilibria);
  }

  TEST_CASE("equilibrium satisfies chain balance and the ratio identity") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2, 3, 5}) {
      const ProofreadingRates r = crnzero::testing::random_proofreading_rates(n, rng);
      const Network net = build_mckeithan(r);
      const EquilibriumResult e = class_equilibrium(net, proofreading_class(net, 2.0, 1.5));
      const Vector& x = e.x_bar;
      CHECK(x.minCoeff() > 0.0);
      auto c = [&](int i) { return x[i + 2]; };
      auto kp = [&](int i) { return r.k_p[static_cast<std::size_t>(i)]; };
      auto km = [&](int i) { return r.k_minus[static_cast<std::size_t>(i)]; };
      auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
      CHECK(close(r.k1 * x[0] * x[1], (km(0) + kp(0)) * c(0)));
      for (int i = 1; i < n; ++i) {
        CHECK(close(kp(i - 1) * c(i - 1), (km(i) + kp(i)) * c(i)));
        CHECK(close(c(i) / c(i - 1), kp(i - 1) / (km(i) + kp(i))));
      }
      CHECK(close(kp(n - 1) * c(n - 1), km(n) * c(n)));
      double bound = 0.0;
      for (int i = 0; i <= n; ++i) bound += c(i);
      CHECK(close(x[0] + bound, 2.0));
      CHECK(close(x[1] + bound, 1.5));
    }
  }

  TEST_CASE("reduced and full systems agree") {
    std::mt19937_64 rng(4);
    for (int n : {0, 2, 4}) {
      const ProofreadingRates r = crnzero::testing::random_proofreading_rates(n, rng);
      const Network net = build_mckeithan(r);
      const double ts = 1.3;
      const double ms = 0.8;
      const Vector x0 = crnzero::testing::random_proofreading_state(n, ts, ms, rng);
      SimOptions o;
      o.t_end = 50.0;
      o.abs_tol = 1e-14;
      o.rel_tol = 1e-12;
      for (int k = 1; k <= 49; ++k) o.output_times.push_back(k);
      const Trajectory full = simulate(net, x0, o);
      const OdeRhs rhs = [&](const Vector& c, Vector& out) { out = reduced_field(r, ts, ms, c); };
      const Trajectory reduced = integrate(rhs, x0.tail(n + 1), o);
      auto dense_states = [](const Trajectory& t) {
        std::vector<Vector> s;
        for (std::size_t k = 0; k < t.size(); ++k) {
          if (t.dense[k] || k + 1 == t.size()) s.push_back(t.states[k]);
        }
        return s;
      };
      const auto a = dense_states(full);
      const auto b = dense_states(reduced);
      REQUIRE(a.size() == 50);
      REQUIRE(b.size() == 50);
      double worst = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const Vector ca = a[k].tail(n + 1);
        worst = std::max(worst, ((ca - b[k]).array().abs() / ca.array().abs()).maxCoeff());
      }
      CHECK(worst <= 1e-8);
    }
  }

  TEST_CASE("reduced field matches the full field on the class") {
    std::mt19937_64 rng(5);
    const ProofreadingRates r = crnzero::testing::random_proofreading_rates(3, rng);
    const Network net = build_mckeithan(r);
    for (int k = 0; k < 10; ++k) {
      const Vector x = crnzero::testing::random_proofreading_state(3, 2.0, 1.0, rng);
      const Vector full = vector_field(net, x).tail(4);
      const Vector red = reduced_field(r, 2.0, 1.0, x.tail(4));
      CHECK((full - red).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + full.cwiseAbs().maxCoeff()));
      const Vector direct = crnzero::testing::proofreading_field_direct(r, x);
      CHECK((vector_field(net, x) - direct).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
    }
  }
}
