#include "crnzero/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crnzero/dynamics.hpp"
#include "crnzero/errors.hpp"
#include "crnzero/simplex.hpp"

namespace crnzero {

Matrix a_tilde(const Network& net) {
  Matrix at = net.rates();
  for (Index j = 0; j < at.cols(); ++j) {
    double off = 0.0;
    for (Index i = 0; i < at.rows(); ++i) {
      if (i != j) off += at(i, j);
    }
    at(j, j) = -off;
  }
  return at;
}

KernelVector pf_kernel(const Network& net, const KernelOptions& opts) {
  const Matrix at = a_tilde(net);
  const Index m = at.rows();
  double gamma = 0.0;
  for (Index j = 0; j < m; ++j) gamma = std::max(gamma, -at(j, j));
  gamma += 1.0;
  const Matrix ahat = at + gamma * Matrix::Identity(m, m);
  const double bound = opts.tol * (1.0 + at.cwiseAbs().rowwise().sum().maxCoeff());

  Vector y;
  if (opts.initial.size() == 0) {
    y = Vector::Constant(m, 1.0 / static_cast<double>(m));
  } else {
    if (opts.initial.size() != m || !(opts.initial.minCoeff() > 0.0)) {
      throw StructureError("pf_kernel: initial vector must be strictly positive of length m");
    }
    y = opts.initial / opts.initial.sum();
  }

  KernelVector out;
  double residual = (at * y).cwiseAbs().maxCoeff();
  std::size_t polish = 0;
  Vector next(m);
  while (out.iterations < opts.max_iterations) {
    if (residual <= bound) {
      // A few extra sweeps once inside the bound, while they still help.
      if (++polish > 20) break;
    }
    next.noalias() = ahat * y;
    next /= next.sum();
    const double r = (at * next).cwiseAbs().maxCoeff();
    ++out.iterations;
    if (residual <= bound && r >= residual) break;
    y.swap(next);
    residual = r;
  }
  if (residual > bound) {
    throw NumericalError("pf_kernel: residual " + format_real(residual) + " above bound after " +
                         std::to_string(out.iterations) + " iterations");
  }
  if (!(y.minCoeff() > 0.0)) throw NumericalError("pf_kernel: limit vector not strictly positive");
  out.y_bar = y;
  out.residual = residual;
  return out;
}

EquilibriumResult some_positive_equilibrium(const Network& net, const KernelOptions& opts) {
  const KernelVector kv = pf_kernel(net, opts);
  const Matrix& b = net.complexes();
  const Matrix gram = b.transpose() * b;
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("B'B is not positive definite");
  const Vector log_y = kv.y_bar.array().log().matrix();
  const Vector z = b * llt.solve(log_y);
  const double solve_residual = (b.transpose() * z - log_y).cwiseAbs().maxCoeff();
  if (!(solve_residual <= 1e-9 * (1.0 + log_y.cwiseAbs().maxCoeff()))) {
    throw NumericalError("B'B is ill-conditioned: normal-equation residual " + format_real(solve_residual));
  }
  EquilibriumResult out;
  out.x_bar.resize(z.size());
  for (Index i = 0; i < z.size(); ++i) out.x_bar[i] = net.kinetics().rho_inverse(z[i]);
  out.field_residual = vector_field(net, out.x_bar).cwiseAbs().maxCoeff();
  out.iterations = kv.iterations;
  return out;
}

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void require_positive(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw StructureError(std::string("coordinatize: ") + what + " must be strictly positive");
    }
  }
}

}  // namespace

CoordinatizeResult coordinatize(const StoichBasis& basis, const Vector& p, const Vector& q,
                                const Kinetics& kinetics, const CoordinatizeOptions& opts) {
  const Index n = basis.ambient_dim();
  if (p.size() != n || q.size() != n) throw StructureError("coordinatize: dimension mismatch");
  require_positive(p, "p");
  require_positive(q, "q");
  const double pk = kinetics.exponent;
  const Matrix& v = basis.dperp_basis;
  const Index c = v.cols();

  CoordinatizeResult out;
  auto finish = [&](Vector x) {
    out.class_residual = c ? inf_norm(basis.project_dperp(x - p)) : 0.0;
    out.log_residual = basis.dim() ? inf_norm(basis.project_d(kinetics.rho(x) - kinetics.rho(q))) : 0.0;
    out.x = std::move(x);
    return out;
  };
  if (c == 0) return finish(q);
  if (basis.dim() == 0) return finish(p);

  Vector y = opts.initial.size() ? opts.initial : Vector::Zero(c);
  if (y.size() != c) throw StructureError("coordinatize: initial coordinates have wrong length");

  Vector x(n);
  auto evaluate = [&](const Vector& coords, Vector& state) {
    const Vector u = v * coords;
    double f = 0.0;
    for (Index i = 0; i < n; ++i) {
      state[i] = q[i] * std::exp(u[i] / pk);
      f += pk * state[i] - p[i] * u[i];
    }
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  double f = evaluate(y, x);
  if (!std::isfinite(f)) throw NumericalError("coordinatize: objective not finite at the start");
  Vector g = v.transpose() * (x - p);
  const double gtol = opts.gradient_tol * (1.0 + inf_norm(p));
  Vector x_trial(n);
  Vector y_trial(c);

  while (inf_norm(g) > gtol) {
    if (out.iterations >= opts.max_iterations) break;
    ++out.iterations;
    const Matrix h = v.transpose() * (x / pk).asDiagonal() * v;
    Eigen::LDLT<Matrix> ldlt(h);
    Vector d;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() >= opts.min_rcond) {
      d = ldlt.solve(-g);
    }
    if (d.size() == 0 || !d.allFinite() || g.dot(d) >= 0.0) {
      d = -g;
      ++out.gradient_steps;
    }
    // Limit the change of any log-coordinate so the exponentials stay finite.
    const double step = inf_norm(v * d);
    if (step > 10.0 * pk) d *= 10.0 * pk / step;
    const double slope = g.dot(d);

    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-20) {
      y_trial = y + alpha * d;
      const double ft = evaluate(y_trial, x_trial);
      if (ft <= f + opts.armijo * alpha * slope) {
        accepted = true;
      } else if (alpha == 1.0 && ft <= f + 1e-12 * (1.0 + std::abs(f))) {
        // Near the minimum the decrease is below roundoff in f; accept a
        // full step that still reduces the gradient.
        accepted = inf_norm(v.transpose() * (x_trial - p)) < inf_norm(g);
      }
      if (accepted) {
        y.swap(y_trial);
        x.swap(x_trial);
        f = ft;
        break;
      }
      alpha *= 0.5;
    }
    g = v.transpose() * (x - p);
    if (!accepted) break;
  }

  finish(x);
  const double scale = std::max(1.0, inf_norm(p));
  if (!(out.class_residual <= opts.residual_tol * scale) ||
      !(out.log_residual <= opts.residual_tol * std::max(1.0, inf_norm(kinetics.rho(q))))) {
    throw NumericalError("coordinatize: residuals " + format_real(out.class_residual) + ", " +
                         format_real(out.log_residual) + " after " + std::to_string(out.iterations) +
                         " iterations");
  }
  return out;
}

Vector positive_class_point(const StoichBasis& basis, const ClassDescriptor& cls, double positivity_tol) {
  FeasibilityProblem problem{basis.dperp_basis.transpose(), cls.conservation_values, {}};
  const double cap = std::max(1.0, inf_norm(cls.anchor_point));
  const auto mm = maximize_min(problem, cap);
  if (!mm || !(mm->min_value > positivity_tol)) {
    throw ClassNotPositive("class has no strictly positive point");
  }
  return mm->x;
}

EquilibriumResult class_equilibrium(const Network& net, const ClassDescriptor& cls,
                                    const ClassEquilibriumOptions& opts) {
  const StoichBasis basis = stoich_basis(net);
  if (cls.conservation_values.size() != basis.codim()) {
    throw StructureError("class descriptor does not match the network");
  }
  Vector anchor = cls.anchor_point;
  if (anchor.size() != 0 && anchor.size() != net.num_species()) {
    throw StructureError("class anchor has wrong dimension");
  }
  if (anchor.size() == 0 || !(anchor.minCoeff() > 0.0)) {
    anchor = positive_class_point(basis, cls, opts.positivity_tol);
  }
  const EquilibriumResult ref = some_positive_equilibrium(net, opts.kernel);
  const CoordinatizeResult cr = coordinatize(basis, anchor, ref.x_bar, net.kinetics(), opts.coordinatize);

  EquilibriumResult out;
  out.x_bar = cr.x;
  out.field_residual = vector_field(net, cr.x).cwiseAbs().maxCoeff();
  out.class_residual =
      basis.codim() ? inf_norm(basis.dperp_basis.transpose() * cr.x - cls.conservation_values) : 0.0;
  out.log_residual = cr.log_residual;
  out.iterations = cr.iterations;
  out.anchor = anchor;
  if (!(out.field_residual <= opts.field_tol)) {
    throw NumericalError("class_equilibrium: field residual " + format_real(out.field_residual) +
                         " above tolerance");
  }
  return out;
}

}  // namespace crnzero

