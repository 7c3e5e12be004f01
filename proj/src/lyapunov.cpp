#include "crnzero/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "crnzero/equilibria.hpp"
#include "crnzero/errors.hpp"
#include "crnzero/simplex.hpp"

namespace crnzero {

double entropy_W(const Vector& x, const Vector& z, const Kinetics& kinetics) {
  if (x.size() != z.size()) throw StructureError("entropy_W: dimension mismatch");
  double w = 0.0;
  for (Index i = 0; i < x.size(); ++i) w += kinetics.rho_integral(x[i]) - x[i] * kinetics.rho(z[i]);
  return w;
}

Vector entropy_W_gradient(const Vector& x, const Vector& z, const Kinetics& kinetics) {
  return kinetics.rho(x) - kinetics.rho(z);
}

double lyapunov_V(const Vector& x, const Vector& x_bar, const Kinetics& kinetics) {
  if (x.size() != x_bar.size()) throw StructureError("lyapunov_V: dimension mismatch");
  double v = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double zi = x_bar[i];
    v += (xi > 0.0 ? xi * std::log(xi / zi) : 0.0) - xi + zi;
  }
  return kinetics.exponent * v;
}

namespace {

Vector log_difference(const Network& net, const Vector& x, const Vector& z) {
  if (x.size() != net.num_species() || z.size() != net.num_species()) {
    throw StructureError("state has wrong dimension");
  }
  return net.kinetics().rho(x) - net.kinetics().rho(z);
}

}  // namespace

double delta(const Network& net, const Vector& x, const Vector& z) {
  const Vector s = net.complexes().transpose() * log_difference(net, x, z);
  double d = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    for (Index j = 0; j < s.size(); ++j) d += (s[i] - s[j]) * (s[i] - s[j]);
  }
  return d;
}

double separation_Delta(const Network& net, const StoichBasis& basis, const Vector& x, const Vector& z) {
  const Vector s = net.complexes().transpose() * log_difference(net, x, z);
  double d = 0.0;
  for (Index i = 1; i < s.size(); ++i) d += (s[i] - s[0]) * (s[i] - s[0]);
  if (basis.codim() > 0) d += (basis.dperp_basis.transpose() * (x - z)).squaredNorm();
  return d;
}

double separation_Delta(const Network& net, const Vector& x, const Vector& z) {
  return separation_Delta(net, stoich_basis(net), x, z);
}

double quadratic_Q(const Network& net, const Vector& eta) {
  const Matrix& a = net.rates();
  if (eta.size() != a.rows()) throw StructureError("quadratic_Q: dimension mismatch");
  double q = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != j) q += a(i, j) * (eta[i] - eta[j]) * (eta[i] - eta[j]);
    }
  }
  return q;
}

Matrix kappa_form(const Network& net) {
  const Matrix& a = net.rates();
  const Index m = a.rows();
  const Index last = m - 1;
  Matrix form = Matrix::Zero(last, last);
  for (Index i = 0; i < last; ++i) {
    for (Index j = 0; j < last; ++j) {
      if (i == j) continue;
      form(i, i) += a(i, j);
      form(j, j) += a(i, j);
      form(i, j) -= a(i, j);
      form(j, i) -= a(i, j);
    }
    form(i, i) += a(i, last) + a(last, i);
  }
  return form;
}

KappaBound kappa_bound(const Network& net, std::size_t probes, std::uint64_t seed, double tol) {
  const Index m = net.num_complexes();
  KappaBound out;
  out.form = kappa_form(net);
  if (m == 1) {
    out.kappa0 = 1.0;
    out.kappa = 1.0;
    out.sample_check = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(out.form, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("kappa_bound: eigensolver failed");
  out.kappa0 = eig.eigenvalues()[0];
  if (!(out.kappa0 > tol)) {
    throw NumericalError("kappa_bound: smallest eigenvalue " + format_real(out.kappa0) + " not positive");
  }
  out.kappa = out.kappa0 / (4.0 * static_cast<double>(m));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector q(m);
  out.sample_check = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < probes; ++s) {
    for (Index i = 0; i < m; ++i) q[i] = normal(rng);
    double spread = 0.0;
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) spread += (q[i] - q[j]) * (q[i] - q[j]);
    }
    const double lhs = quadratic_Q(net, q);
    const double rhs = out.kappa * spread;
    if (lhs < rhs) ++out.violations;
    if (rhs > 0.0) out.sample_check = std::min(out.sample_check, lhs / rhs);
  }
  out.probes = probes;
  return out;
}

double scalar_inequality_probe(std::size_t probes, std::uint64_t seed, double a_max, double r_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.0, a_max);
  std::uniform_real_distribution<double> ur(0.0, r_max);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < probes; ++s) {
    double a = ua(rng);
    if (a == 0.0) a = std::numeric_limits<double>::min();
    const double r = ur(rng);
    // e^a(r−a) − e^r + e^a = −e^a (expm1(d) − d) with d = r − a, without cancellation.
    const double d = r - a;
    const double value = -std::exp(a) * (std::expm1(d) - d) + 0.5 * d * d;
    worst = std::max(worst, value);
  }
  return worst;
}

double c_of(const Network& net, double kappa, const Vector& z) {
  return kappa * monomials(net, z).minCoeff() / 2.0;
}

double c_of(const Network& net, const Vector& z) { return c_of(net, kappa_bound(net).kappa, z); }

CertificateReport decrease_certificate(const Network& net, const Vector& x_bar, const Trajectory& traj,
                                       const CertificateOptions& opts) {
  CertificateReport out;
  const double kappa = opts.kappa ? *opts.kappa : kappa_bound(net).kappa;
  out.c_used = c_of(net, kappa, x_bar);
  out.decrease_violation = -std::numeric_limits<double>::infinity();
  out.monotonicity_violation = -std::numeric_limits<double>::infinity();
  const FieldEvaluator field(net);
  Vector f;
  Vector scratch;
  double v_prev = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& x = traj.states[k];
    const double v = lyapunov_V(x, x_bar, net.kinetics());
    if (k > 0) out.monotonicity_violation = std::max(out.monotonicity_violation, v - v_prev);
    v_prev = v;
    if (!(x.minCoeff() > 0.0)) {
      ++out.skipped_boundary;
      continue;
    }
    field.evaluate(x, f, scratch);
    const double lhs = entropy_W_gradient(x, x_bar, net.kinetics()).dot(f) + out.c_used * delta(net, x, x_bar);
    if (lhs > out.decrease_violation) {
      out.decrease_violation = lhs;
      out.worst_index = k;
    }
    ++out.checked_points;
  }
  out.max_violation = std::max(out.decrease_violation, out.monotonicity_violation);
  out.pass = out.max_violation <= opts.slack;
  return out;
}

void annotate_lyapunov(const Network& net, const Vector& x_bar, Trajectory& traj) {
  traj.lyapunov.resize(traj.size());
  traj.deviation.resize(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vector& x = traj.states[k];
    traj.lyapunov[k] = lyapunov_V(x, x_bar, net.kinetics());
    traj.deviation[k] = x.minCoeff() > 0.0 ? delta(net, x, x_bar) : std::numeric_limits<double>::quiet_NaN();
  }
}

namespace {

// Face of the class with the coordinates in `zero` pinned to 0; returns a
// point positive on every coordinate that is not forced to 0, or nullopt.
std::optional<Vector> relative_interior_point(const Matrix& a, const Vector& b, std::vector<bool>& zero,
                                              double cap, const LpOptions& lp) {
  const Index n = a.cols();
  std::vector<Index> free;
  for (Index k = 0; k < n; ++k) {
    if (!zero[static_cast<std::size_t>(k)]) free.push_back(k);
  }
  const auto nf = static_cast<Index>(free.size());
  const Index rows = a.rows();
  Matrix af(rows + 1, nf + 1);
  af.setZero();
  for (Index c = 0; c < nf; ++c) af.block(0, c, rows, 1) = a.col(free[static_cast<std::size_t>(c)]);
  af(rows, nf) = 1.0;
  Vector bf(rows + 1);
  bf.head(rows) = b;
  bf[rows] = cap;

  Vector sum = Vector::Zero(n);
  std::size_t positive = 0;
  bool feasible = false;
  for (Index c = 0; c < nf; ++c) {
    // maximize x_c subject to the face constraints and x_c + w = cap
    Matrix ac = af;
    ac.row(rows).setZero();
    ac(rows, c) = 1.0;
    ac(rows, nf) = 1.0;
    Vector cost = Vector::Zero(nf + 1);
    cost[c] = -1.0;
    const LpResult res = solve_lp(ac, bf, cost, lp);
    if (res.status != LpStatus::kOptimal) return std::nullopt;
    feasible = true;
    const auto k = free[static_cast<std::size_t>(c)];
    if (res.x[c] > lp.tol) {
      for (Index d = 0; d < nf; ++d) sum[free[static_cast<std::size_t>(d)]] += res.x[d];
      ++positive;
    } else {
      zero[static_cast<std::size_t>(k)] = true;
    }
  }
  if (nf == 0) {
    if (rows > 0 && b.cwiseAbs().maxCoeff() > lp.tol) return std::nullopt;
    return Vector::Zero(n);
  }
  if (!feasible) return std::nullopt;
  if (positive == 0) return Vector::Zero(n);
  Vector x = sum / static_cast<double>(positive);
  for (Index k = 0; k < n; ++k) {
    if (zero[static_cast<std::size_t>(k)]) x[k] = 0.0;
  }
  return x;
}

}  // namespace

AttractionLevel attraction_level(const Network& net, const ClassDescriptor& cls, const Vector& x_bar,
                                 const BoundaryOptions& opts) {
  const StoichBasis basis = stoich_basis(net);
  const Index n = net.num_species();
  const Matrix a = basis.dperp_basis.transpose();
  const Vector& b = cls.conservation_values;
  const double cap = 10.0 * (1.0 + (cls.anchor_point.size() ? cls.anchor_point.cwiseAbs().sum() : 0.0));
  AttractionLevel out;
  out.w0 = std::numeric_limits<double>::infinity();

  for (const auto& z : minimal_hitting_sets(support_sets(net), n, opts.pattern_cap)) {
    std::vector<bool> zero(static_cast<std::size_t>(n), false);
    for (Index k : z) zero[static_cast<std::size_t>(k)] = true;
    const auto interior = relative_interior_point(a, b, zero, cap, opts.lp);
    if (!interior) continue;

    std::vector<Index> support;
    for (Index k = 0; k < n; ++k) {
      if (!zero[static_cast<std::size_t>(k)]) support.push_back(k);
    }
    Vector x = Vector::Zero(n);
    if (!support.empty()) {
      const auto ns = static_cast<Index>(support.size());
      Matrix rows(ns, a.rows());
      Vector p(ns), q(ns);
      for (Index c = 0; c < ns; ++c) {
        const Index k = support[static_cast<std::size_t>(c)];
        rows.row(c) = a.col(k).transpose();
        p[c] = (*interior)[k];
        q[c] = x_bar[k];
      }
      // On the face, D is the kernel of the restricted constraints.
      SplitOptions split;
      split.drop_dependent = true;
      const StoichBasis row_split = orthonormal_split(rows, ns, split);
      const StoichBasis face{row_split.dperp_basis, row_split.d_basis};
      const CoordinatizeResult cr = coordinatize(face, p, q, net.kinetics());
      for (Index c = 0; c < ns; ++c) x[support[static_cast<std::size_t>(c)]] = cr.x[c];
    }
    const double v = lyapunov_V(x, x_bar, net.kinetics());
    if (v < out.w0) {
      out.w0 = v;
      out.minimizer = x;
      out.pattern = z;
    }
  }
  return out;
}

}  // namespace crnzero
