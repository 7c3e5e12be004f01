#include <doctest.h>

#include <cmath>
#include <random>

#include "crnzero/dynamics.hpp"
#include "crnzero/equilibria.hpp"
#include "crnzero/errors.hpp"
#include "crnzero/proofreading.hpp"
#include "crnzero/simplex.hpp"
#include "support/oracles.hpp"
#include "support/random_networks.hpp"

using namespace crnzero;

namespace {

Network two_complex() {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  Matrix b(2, 2);
  b << 1, 2, 1, 1;
  return Network(a, b);
}

Network association(double k1, double km) {
  ProofreadingRates r;
  r.k1 = k1;
  r.k_minus = {km};
  return build_mckeithan(r);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

StoichBasis axis_basis() {
  Matrix g(2, 1);
  g << 1, 0;
  return orthonormal_split(g, 2);
}

}  // namespace

TEST_SUITE("equilibria") {
  TEST_CASE("a_tilde examples") {
    Matrix expected(2, 2);
    expected << -1, 2, 1, -2;
    CHECK(a_tilde(association(1, 2)) == expected);
    Matrix sym(2, 2);
    sym << -1, 1, 1, -1;
    CHECK(a_tilde(two_complex()) == sym);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      CHECK(a_tilde(crnzero::testing::random_network(seed)).colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("kernel vectors of small examples") {
    const KernelVector kv = pf_kernel(association(1, 2));
    CHECK(std::abs(kv.y_bar[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(kv.y_bar[1] - 1.0 / 3.0) < 1e-12);
    const KernelVector sym = pf_kernel(two_complex());
    CHECK(std::abs(sym.y_bar[0] - 0.5) < 1e-12);
    CHECK(std::abs(sym.y_bar[1] - 0.5) < 1e-12);
  }

  TEST_CASE("kernel vector matches an elimination null space") {
    ProofreadingRates r;
    r.n = 1;
    r.k_minus = {1.0, 1.0};
    r.k_p = {1.0};
    const Network net = build_mckeithan(r);
    const Vector oracle = crnzero::testing::elimination_kernel(a_tilde(net));
    CHECK((pf_kernel(net).y_bar - oracle / oracle.sum()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("kernel vector does not depend on the start") {
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Network net = crnzero::testing::random_network(seed);
      KernelOptions a;
      a.initial = crnzero::testing::random_positive(rng, net.num_complexes());
      KernelOptions b;
      b.initial = crnzero::testing::random_positive(rng, net.num_complexes());
      const KernelVector ka = pf_kernel(net, a);
      const KernelVector kb = pf_kernel(net, b);
      CHECK((ka.y_bar - kb.y_bar).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(ka.y_bar.minCoeff() > 0.0);
    }
    KernelOptions bad;
    bad.initial = vec({1.0, 0.0});
    CHECK_THROWS_AS(pf_kernel(two_complex(), bad), StructureError);
  }

  TEST_CASE("some positive equilibrium is an equilibrium") {
    const EquilibriumResult e = some_positive_equilibrium(two_complex());
    CHECK(std::abs(e.x_bar[0] - 1.0) < 1e-12);
    CHECK(vector_field(two_complex(), e.x_bar).cwiseAbs().maxCoeff() < 1e-12);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Network net = crnzero::testing::random_network(seed);
      const EquilibriumResult r = some_positive_equilibrium(net);
      CHECK(r.x_bar.minCoeff() > 0.0);
      CHECK(r.field_residual < 1e-9);
      CHECK((monomials(net, r.x_bar) - pf_kernel(net).y_bar).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("coordinatize on a coordinate axis") {
    const CoordinatizeResult r = coordinatize(axis_basis(), vec({2, 3}), vec({5, 7}), Kinetics{});
    CHECK(std::abs(r.x[0] - 5.0) < 1e-12);
    CHECK(std::abs(r.x[1] - 3.0) < 1e-12);
  }

  TEST_CASE("coordinatize with trivial subspaces") {
    const Vector p = vec({2, 3});
    const Vector q = vec({5, 7});
    const StoichBasis zero = orthonormal_split(Matrix(2, 0), 2);
    CHECK(coordinatize(zero, p, q, Kinetics{}).x == p);
    Matrix g(2, 2);
    g << 1, 0, 0, 1;
    CHECK(coordinatize(orthonormal_split(g, 2), p, q, Kinetics{}).x == q);
  }

  TEST_CASE("coordinatize fixed point and conditions") {
    std::mt19937_64 rng(77);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Network net = crnzero::testing::random_network(seed);
      const StoichBasis basis = stoich_basis(net);
      const Vector p = crnzero::testing::random_positive(rng, net.num_species());
      const Vector q = crnzero::testing::random_positive(rng, net.num_species());
      const CoordinatizeResult r = coordinatize(basis, p, q, net.kinetics());
      CHECK(r.class_residual <= 1e-10);
      CHECK(r.log_residual <= 1e-10);
      // Independent check of the two conditions.
      CHECK((basis.dperp_basis.transpose() * (r.x - p)).cwiseAbs().maxCoeff() < 1e-9);
      const Vector dlog = (r.x.array().log() - q.array().log()).matrix();
      CHECK((basis.d_basis.transpose() * dlog).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((coordinatize(basis, p, p, net.kinetics()).x - p).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("coordinatize with a non-unit exponent") {
    const StoichBasis basis = axis_basis();
    const CoordinatizeResult r = coordinatize(basis, vec({2, 3}), vec({5, 7}), Kinetics{2.0});
    CHECK(std::abs(r.x[0] - 5.0) < 1e-12);
    CHECK(std::abs(r.x[1] - 3.0) < 1e-12);
  }

  TEST_CASE("coordinatize rejects non-positive inputs") {
    CHECK_THROWS_AS(coordinatize(axis_basis(), vec({0, 3}), vec({5, 7}), Kinetics{}), StructureError);
    CHECK_THROWS_AS(coordinatize(axis_basis(), vec({2, 3}), vec({5, -7}), Kinetics{}), StructureError);
  }

  TEST_CASE("the objective grows in both directions along each coordinate") {
    // With p, q > 0 and v ≠ 0, Σ q_i e^{t v_i} − p_i t v_i is unbounded as |t| grows.
    std::mt19937_64 rng(5);
    const Network net = crnzero::testing::random_network(3);
    const StoichBasis basis = stoich_basis(net);
    const Vector p = crnzero::testing::random_positive(rng, net.num_species());
    const Vector q = crnzero::testing::random_positive(rng, net.num_species());
    auto objective = [&](const Vector& u) {
      double f = 0.0;
      for (Index i = 0; i < u.size(); ++i) f += q[i] * std::exp(u[i]) - p[i] * u[i];
      return f;
    };
    for (Index c = 0; c < basis.codim(); ++c) {
      const Vector d = basis.dperp_basis.col(c);
      CHECK(objective(50.0 * d) > objective(Vector::Zero(d.size())) + 10.0);
      CHECK(objective(-50.0 * d) > objective(Vector::Zero(d.size())) + 10.0);
    }
  }

  TEST_CASE("class equilibria of the two-complex example") {
    const Network net = two_complex();
    for (double r : {0.5, 1.0, 2.0}) {
      const EquilibriumResult e = class_equilibrium(net, class_of(net, vec({0.3, r})));
      CHECK(std::abs(e.x_bar[0] - 1.0) < 1e-9);
      CHECK(std::abs(e.x_bar[1] - r) < 1e-9);
    }
  }

  TEST_CASE("class equilibrium of the association reaction") {
    const Network net = association(1, 1);
    const EquilibriumResult e = class_equilibrium(net, class_of(net, vec({2, 2, 0})));
    CHECK((e.x_bar - vec({1, 1, 1})).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(e.anchor.minCoeff() > 0.0);
  }

  TEST_CASE("class equilibrium is unique over restarts") {
    std::mt19937_64 rng(9);
    const Network net = build_mckeithan(crnzero::testing::random_proofreading_rates(3, rng));
    const ClassDescriptor cls = proofreading_class(net, 2.0, 3.0);
    const EquilibriumResult base = class_equilibrium(net, cls);
    CHECK(base.x_bar.minCoeff() > 0.0);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 10; ++k) {
      ClassEquilibriumOptions o;
      o.coordinatize.initial = Vector(stoich_basis(net).codim());
      for (Index i = 0; i < o.coordinatize.initial.size(); ++i) o.coordinatize.initial[i] = normal(rng);
      CHECK((class_equilibrium(net, cls, o).x_bar - base.x_bar).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("classes without positive points") {
    const Network net = two_complex();
    CHECK_THROWS_AS(class_equilibrium(net, class_of(net, vec({0.5, 0.0}))), ClassNotPositive);
  }

  TEST_CASE("positive class point maximizes the smallest coordinate") {
    const Network net = association(1, 1);
    const StoichBasis basis = stoich_basis(net);
    const Vector x = positive_class_point(basis, class_of(basis, vec({2, 2, 0})));
    CHECK(x.minCoeff() > 0.5);
    CHECK((basis.dperp_basis.transpose() * (x - vec({2, 2, 0}))).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("simplex basics") {
    Matrix a(1, 2);
    a << 1, 1;
    const LpResult r = solve_lp(a, vec({1}), vec({1, 2}));
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-12);
    CHECK(std::abs(r.objective - 1.0) < 1e-12);

    CHECK(linear_feasibility({a, vec({1}), {}}).has_value());
    Matrix e(1, 2);
    e << 1, 0;
    CHECK_FALSE(linear_feasibility({e, vec({-1}), {}}).has_value());
    CHECK_FALSE(linear_feasibility({a, vec({1}), {true, true}}).has_value());

    Matrix u(1, 2);
    u << 1, -1;
    CHECK(solve_lp(u, vec({0}), vec({-1, 0})).status == LpStatus::kUnbounded);

    const auto mm = maximize_min({a, vec({1}), {}}, 10.0);
    REQUIRE(mm.has_value());
    CHECK(std::abs(mm->min_value - 0.5) < 1e-12);
  }
}
