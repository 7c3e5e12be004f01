#include "crnzero/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include "crnzero/errors.hpp"

namespace crnzero {

namespace {

double power_of(double x, double c) {
  if (c == 0.0) return 1.0;
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), c);
}

void require_state(const Network& net, const Vector& x) {
  if (x.size() != net.num_species()) throw StructureError("state has wrong dimension");
}

}  // namespace

// --- field evaluation ----------------------------------------------------------

FieldEvaluator::FieldEvaluator(const Network& net, bool polynomial_extension)
    : n_(net.num_species()),
      m_(net.num_complexes()),
      polynomial_extension_(polynomial_extension),
      factors_(static_cast<std::size_t>(m_)),
      inflow_(static_cast<std::size_t>(m_)),
      outflow_(static_cast<std::size_t>(m_), 0.0),
      b_columns_(static_cast<std::size_t>(m_)) {
  const Matrix& a = net.rates();
  const Matrix& b = net.complexes();
  const double p = net.kinetics().exponent;
  for (Index j = 0; j < m_; ++j) {
    auto col = static_cast<std::size_t>(j);
    for (Index k = 0; k < n_; ++k) {
      if (b(k, j) == 0.0) continue;
      const double c = p * b(k, j);
      const double rounded = std::round(c);
      const int ip = (c == rounded && rounded >= 1.0 && rounded <= 8.0) ? static_cast<int>(rounded) : 0;
      factors_[col].push_back({k, c, ip});
      b_columns_[col].push_back({k, b(k, j)});
    }
    for (Index i = 0; i < m_; ++i) {
      if (i == j || a(i, j) == 0.0) continue;
      inflow_[static_cast<std::size_t>(i)].push_back({j, a(i, j)});
      outflow_[col] += a(i, j);
    }
  }
}

void FieldEvaluator::monomials(const Vector& x, Vector& out) const {
  out.resize(m_);
  for (Index j = 0; j < m_; ++j) {
    double v = 1.0;
    for (const Factor& f : factors_[static_cast<std::size_t>(j)]) {
      const double xk = x[f.species];
      if (xk == 0.0) {
        v = 0.0;
        break;
      }
      if (f.integer_power > 0) {
        const double ax = polynomial_extension_ ? xk : std::abs(xk);
        double t = ax;
        for (int r = 1; r < f.integer_power; ++r) t *= ax;
        v *= t;
      } else {
        v *= std::pow(std::abs(xk), f.power);
      }
    }
    out[j] = v;
  }
}

void FieldEvaluator::evaluate(const Vector& x, Vector& out, Vector& scratch) const {
  monomials(x, scratch);
  out.setZero(n_);
  for (Index i = 0; i < m_; ++i) {
    const auto row = static_cast<std::size_t>(i);
    double yi = -outflow_[row] * scratch[i];
    for (const Entry& e : inflow_[row]) yi += e.value * scratch[e.index];
    if (yi == 0.0) continue;
    for (const Entry& e : b_columns_[row]) out[e.index] += e.value * yi;
  }
}

Vector FieldEvaluator::operator()(const Vector& x) const {
  Vector out;
  Vector scratch;
  evaluate(x, out, scratch);
  return out;
}

Vector monomials(const Network& net, const Vector& x) {
  require_state(net, x);
  const Matrix& b = net.complexes();
  const double p = net.kinetics().exponent;
  Vector out(net.num_complexes());
  for (Index j = 0; j < b.cols(); ++j) {
    double v = 1.0;
    for (Index k = 0; k < b.rows() && v != 0.0; ++k) v *= power_of(x[k], p * b(k, j));
    out[j] = v;
  }
  return out;
}

Vector vector_field_double_sum(const Network& net, const Vector& x) {
  const Vector theta = monomials(net, x);
  const Matrix& a = net.rates();
  const Matrix& b = net.complexes();
  Vector f = Vector::Zero(net.num_species());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      f += a(i, j) * theta[j] * (b.col(i) - b.col(j));
    }
  }
  return f;
}

Vector vector_field_exponential(const Network& net, const Vector& x) {
  require_state(net, x);
  const Vector r = net.kinetics().rho(x);
  const Matrix& a = net.rates();
  const Matrix& b = net.complexes();
  Vector f = Vector::Zero(net.num_species());
  for (Index j = 0; j < a.cols(); ++j) {
    double exponent = 0.0;
    for (Index k = 0; k < b.rows(); ++k) {
      if (b(k, j) != 0.0) exponent += b(k, j) * r[k];
    }
    const double e = std::exp(exponent);
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) == 0.0) continue;
      f += a(i, j) * e * (b.col(i) - b.col(j));
    }
  }
  return f;
}

double field_term_scale(const Network& net, const Vector& x) {
  const Vector theta = monomials(net, x);
  const Matrix& a = net.rates();
  const Matrix& b = net.complexes();
  double scale = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i == j || a(i, j) == 0.0) continue;
      scale += a(i, j) * theta[j] * (b.col(i) - b.col(j)).cwiseAbs().maxCoeff();
    }
  }
  return scale;
}

Vector vector_field(const Network& net, const Vector& x, bool cross_check) {
  require_state(net, x);
  const Vector f = FieldEvaluator(net)(x);
  if (cross_check) {
    const Vector g = vector_field_double_sum(net, x);
    const double diff = (f - g).cwiseAbs().maxCoeff();
    if (diff > 1e-12 * (1.0 + field_term_scale(net, x))) {
      throw NumericalError("vector_field: matrix and double-sum forms disagree by " + format_real(diff));
    }
  }
  return f;
}

AlphaBeta alpha_beta(const Network& net, const Vector& x, Index k) {
  require_state(net, x);
  if (k < 0 || k >= net.num_species()) throw StructureError("alpha_beta: species index out of range");
  const Matrix& a = net.rates();
  const Matrix& b = net.complexes();
  const double p = net.kinetics().exponent;
  const Index m = net.num_complexes();
  AlphaBeta out;
  for (Index j = 0; j < m; ++j) {
    const double bkj = b(k, j);
    if (bkj > 0.0 && bkj < 1.0) throw StructureError("alpha_beta: complex entry in (0,1)");
    double mono = 1.0;
    for (Index l = 0; l < b.rows() && mono != 0.0; ++l) {
      const double c = (l == k && bkj >= 1.0) ? p * (bkj - 1.0) : p * b(l, j);
      mono *= power_of(x[l], c);
    }
    double weight = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (a(i, j) == 0.0) continue;
      weight += bkj >= 1.0 ? a(i, j) * (b(k, i) - bkj) : a(i, j) * b(k, i);
    }
    (bkj >= 1.0 ? out.alpha : out.beta) += weight * mono;
  }
  return out;
}

// --- integration ---------------------------------------------------------------

double Trajectory::max_drift() const {
  double d = 0.0;
  for (double v : drift) d = std::max(d, v);
  return d;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

Vector hermite(double theta, double h, const Vector& y0, const Vector& f0, const Vector& y1,
               const Vector& f1) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * h * f0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * f1;
}

class Integrator {
 public:
  Integrator(const OdeRhs& rhs, const Vector& x0, const SimOptions& opts, const Matrix& invariants,
             bool nonnegative)
      : rhs_(rhs), opts_(opts), invariants_(invariants), nonnegative_(nonnegative) {
    if (!(opts.t_end > 0.0)) throw IntegrationError("t_end must be positive");
    if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0)) throw IntegrationError("tolerances must be positive");
    if (invariants_.cols() > 0) invariant0_ = invariants_.transpose() * x0;
    outputs_ = opts.output_times;
    std::sort(outputs_.begin(), outputs_.end());
    outputs_.erase(std::remove_if(outputs_.begin(), outputs_.end(),
                                  [&](double t) { return !(t > 0.0 && t <= opts.t_end); }),
                   outputs_.end());
    outputs_.erase(std::unique(outputs_.begin(), outputs_.end()), outputs_.end());
  }

  Trajectory run(const Vector& x0) {
    if (nonnegative_ && x0.size() > 0 && x0.minCoeff() < 0.0) {
      throw IntegrationError("initial state has a negative component");
    }
    record(0.0, x0, false);
    return opts_.method == Method::kRK45 ? run_rk45(x0) : run_rk4(x0);
  }

 private:
  void eval(const Vector& x, Vector& out) {
    rhs_(x, out);
    ++traj_.field_evaluations;
  }

  void record(double t, const Vector& x, bool dense) {
    traj_.times.push_back(t);
    traj_.states.push_back(x);
    traj_.dense.push_back(dense);
    traj_.drift.push_back(invariants_.cols() > 0
                              ? (invariants_.transpose() * x - invariant0_).cwiseAbs().maxCoeff()
                              : 0.0);
  }

  // False when some component lies below −eps_neg; otherwise clamps and
  // returns true. `clamped` reports whether anything changed.
  bool admit(Vector& x, bool& clamped) {
    clamped = false;
    if (!nonnegative_ || x.size() == 0) return true;
    const double lowest = x.minCoeff();
    if (lowest < -opts_.eps_neg) return false;
    traj_.min_pre_clamp = std::min(traj_.min_pre_clamp, lowest);
    for (Index i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0) {
        traj_.max_clamp = std::max(traj_.max_clamp, -x[i]);
        x[i] = 0.0;
        clamped = true;
      }
    }
    return true;
  }

  // True when a component that starts at zero ends below the roundoff level
  // of its own increment. Such a dip is truncation error, not cancellation,
  // so the step is retried rather than clamped.
  bool leaves_zero_downward(const Vector& y, const Vector& ynew, double h,
                            std::initializer_list<const Vector*> stages) const {
    if (!nonnegative_) return false;
    const double b[] = {kB1, kB3, kB4, kB5, kB6};
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 || !(ynew[i] < 0.0)) continue;
      double mag = 0.0;
      std::size_t s = 0;
      for (const Vector* k : stages) mag += std::abs(b[s++] * (*k)[i]);
      if (ynew[i] < -64.0 * std::numeric_limits<double>::epsilon() * h * mag) return true;
    }
    return false;
  }

  void emit_dense(double t, double h, const Vector& y0, const Vector& f0, const Vector& y1,
                  const Vector& f1) {
    while (next_output_ < outputs_.size() && outputs_[next_output_] < t + h) {
      const double tau = outputs_[next_output_++];
      if (tau <= t) continue;
      Vector y = hermite((tau - t) / h, h, y0, f0, y1, f1);
      if (nonnegative_) {
        for (Index i = 0; i < y.size(); ++i) {
          if (y[i] < 0.0) {
            traj_.max_clamp = std::max(traj_.max_clamp, -y[i]);
            y[i] = 0.0;
          }
        }
      }
      record(tau, y, true);
    }
  }

  void skip_outputs_at(double t) {
    while (next_output_ < outputs_.size() && outputs_[next_output_] <= t) ++next_output_;
  }

  void check_step(double t, double h) const {
    if (h < opts_.min_step * std::max(1.0, std::abs(t))) {
      throw IntegrationError("step size underflow at t = " + format_real(t));
    }
  }

  double initial_step(const Vector& y0, const Vector& f0) {
    if (opts_.initial_step > 0.0) return opts_.initial_step;
    auto scaled_norm = [&](const Vector& v, const Vector& ref) {
      if (v.size() == 0) return 0.0;
      double s = 0.0;
      for (Index i = 0; i < v.size(); ++i) {
        const double w = opts_.abs_tol + opts_.rel_tol * std::abs(ref[i]);
        s += (v[i] / w) * (v[i] / w);
      }
      return std::sqrt(s / static_cast<double>(v.size()));
    };
    const double d0 = scaled_norm(y0, y0);
    const double d1 = scaled_norm(f0, y0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opts_.t_end);
    Vector y1 = y0 + h0 * f0;
    Vector f1(y0.size());
    eval(y1, f1);
    const double d2 = scaled_norm(f1 - f0, y0) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, opts_.t_end, opts_.max_step});
  }

  double error_norm(const Vector& err, const Vector& y0, const Vector& y1) const {
    if (err.size() == 0) return 0.0;
    double s = 0.0;
    for (Index i = 0; i < err.size(); ++i) {
      const double w = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      s += (err[i] / w) * (err[i] / w);
    }
    const double e = std::sqrt(s / static_cast<double>(err.size()));
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  }

  Trajectory run_rk45(const Vector& x0) {
    const Index n = x0.size();
    Vector y = x0;
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), stage(n), ynew(n);
    eval(y, k1);
    double t = 0.0;
    double h = initial_step(y, k1);
    double err_old = 1e-4;
    const double t_end = opts_.t_end;
    std::size_t steps = 0;

    while (t < t_end) {
      if (++steps > opts_.max_steps) throw IntegrationError("step limit exceeded");
      h = std::min(h, opts_.max_step);
      bool last = false;
      if (t + 1.01 * h >= t_end) {
        h = t_end - t;
        last = true;
      }
      check_step(t, h);

      stage = y + h * kA21 * k1;
      eval(stage, k2);
      stage = y + h * (kA31 * k1 + kA32 * k2);
      eval(stage, k3);
      stage = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      eval(stage, k4);
      stage = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      eval(stage, k5);
      stage = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      eval(stage, k6);
      ynew = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      eval(ynew, k7);
      const Vector err = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
      const double e = error_norm(err, y, ynew);

      if (e > 1.0) {
        ++traj_.rejected_steps;
        h /= std::min(5.0, std::pow(e, 0.17) / 0.9);
        continue;
      }
      bool clamped = false;
      if (leaves_zero_downward(y, ynew, h, {&k1, &k3, &k4, &k5, &k6}) || !admit(ynew, clamped)) {
        ++traj_.rejected_steps;
        ++traj_.negativity_rejections;
        h *= 0.5;
        continue;
      }
      if (clamped) eval(ynew, k7);

      emit_dense(t, h, y, k1, ynew, k7);
      t = last ? t_end : t + h;
      skip_outputs_at(t);
      record(t, ynew, false);
      ++traj_.accepted_steps;

      const double fac = std::pow(std::max(e, 1e-10), 0.17) / std::pow(err_old, 0.04) / 0.9;
      h /= std::clamp(fac, 0.1, 5.0);
      err_old = std::max(e, 1e-4);
      y.swap(ynew);
      k1.swap(k7);
    }
    return std::move(traj_);
  }

  Trajectory run_rk4(const Vector& x0) {
    const Index n = x0.size();
    const double t_end = opts_.t_end;
    const double h_nominal = opts_.initial_step > 0.0 ? opts_.initial_step : t_end / 1000.0;
    const auto count = static_cast<std::size_t>(std::ceil(t_end / h_nominal - 1e-9));
    if (count > opts_.max_steps) throw IntegrationError("step limit exceeded");
    Vector y = x0;
    Vector k1(n), k2(n), k3(n), k4(n), stage(n), ynew(n);
    eval(y, k1);
    double t = 0.0;
    for (std::size_t s = 1; s <= count; ++s) {
      const double t_next = s == count ? t_end : static_cast<double>(s) * h_nominal;
      const double h = t_next - t;
      stage = y + 0.5 * h * k1;
      eval(stage, k2);
      stage = y + 0.5 * h * k2;
      eval(stage, k3);
      stage = y + h * k3;
      eval(stage, k4);
      ynew = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      bool clamped = false;
      if (!admit(ynew, clamped)) {
        throw IntegrationError("component below -eps_neg at t = " + format_real(t_next) +
                               "; reduce the step size");
      }
      Vector fnew(n);
      eval(ynew, fnew);
      emit_dense(t, h, y, k1, ynew, fnew);
      t = t_next;
      skip_outputs_at(t);
      record(t, ynew, false);
      ++traj_.accepted_steps;
      y.swap(ynew);
      k1.swap(fnew);
    }
    return std::move(traj_);
  }

  const OdeRhs& rhs_;
  const SimOptions& opts_;
  const Matrix& invariants_;
  bool nonnegative_;
  Vector invariant0_;
  std::vector<double> outputs_;
  std::size_t next_output_ = 0;
  Trajectory traj_;
};

}  // namespace

Trajectory integrate(const OdeRhs& rhs, const Vector& x0, const SimOptions& opts,
                     const Matrix& invariants) {
  const Matrix inv = invariants.cols() > 0 ? invariants : Matrix(x0.size(), 0);
  return Integrator(rhs, x0, opts, inv, false).run(x0);
}

Trajectory simulate(const Network& net, const Vector& x0, const SimOptions& opts) {
  require_state(net, x0);
  for (Index i = 0; i < x0.size(); ++i) {
    if (!(x0[i] >= 0.0)) throw IntegrationError("initial state has a negative component");
  }
  // Stage values of an explicit step may dip below zero; the smooth extension
  // keeps the method's order there, which the entry into the interior needs.
  const FieldEvaluator field(net, true);
  Vector scratch;
  const OdeRhs rhs = [&](const Vector& x, Vector& out) { field.evaluate(x, out, scratch); };
  const Matrix dperp = stoich_basis(net).dperp_basis;
  return Integrator(rhs, x0, opts, dperp, true).run(x0);
}

}  // namespace crnzero
