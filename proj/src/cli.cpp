#include "crnzero/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "crnzero/boundary.hpp"
#include "crnzero/dynamics.hpp"
#include "crnzero/equilibria.hpp"
#include "crnzero/errors.hpp"
#include "crnzero/lyapunov.hpp"
#include "crnzero/network.hpp"
#include "crnzero/proofreading.hpp"

namespace crnzero::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kGrammar = R"(Network file format (line-oriented, '#' starts a comment):
  species <name> <name> ...                  one or more lines; order fixes state indices
  complex <cname> = <k>*<species> + ...      coefficient omitted means 1; "0" is the empty complex
  rate <cname> -> <cname> : <positive real>  sets a_ij with i = target, j = source
  kinetics exponent <positive real>          optional; default 1
)";

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(std::isfinite(v[i]) ? json(v[i]) : json(nullptr));
  return a;
}

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw UsageError(std::string(what) + ": empty entry");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw UsageError(std::string(what) + ": '" + item + "' is not a real number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(what) + ": no values");
  return values;
}

Vector parse_vector(const std::string& text, Index n, const char* what) {
  const auto values = parse_list(text, what);
  if (static_cast<Index>(values.size()) != n) {
    throw UsageError(std::string(what) + ": expected " + std::to_string(n) + " values, got " +
                     std::to_string(values.size()));
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = values[static_cast<std::size_t>(i)];
  return v;
}

json report_json(const ValidationReport& r) {
  json sub = json::array();
  for (const auto& e : r.sub_one_entries) sub.push_back({{"row", e.row}, {"col", e.col}, {"value", e.value}});
  return {{"irreducible", r.irreducible},
          {"rank_B", r.rank_b},
          {"num_complexes", r.num_complexes},
          {"zero_rows", r.zero_rows},
          {"sub_one_entries", sub},
          {"overall", r.overall() ? "pass" : "fail"}};
}

json header(const char* command) { return {{"schema", 1}, {"command", command}}; }

struct Common {
  std::string file;
  std::string out_path;
  std::uint64_t seed = 0;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(const std::vector<std::string>& args) {
    CLI::App app{"Deficiency-zero single-linkage network toolkit", "crnzero"};
    app.footer(kGrammar);
    app.require_subcommand(1);
    app.set_version_flag("--version", "crnzero 1.0");

    add_validate(app);
    add_simulate(app);
    add_equilibrium(app);
    add_lyapunov(app);
    add_boundary(app);
    add_kappa(app);
    add_proofread(app);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kOk : kUsage;
    }
    try {
      return action_();
    } catch (const UsageError& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const ParseError& e) {
      err_ << "error: " << common_.file << ": " << e.what() << "\n";
      return kUsage;
    } catch (const StructureError& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    } catch (const ClassNotPositive& e) {
      err_ << "error: " << e.what() << "\n";
      return kFailed;
    } catch (const NumericalError& e) {
      err_ << "error: " << e.what() << "\n";
      return kFailed;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kUsage;
    }
  }

 private:
  Network load() const {
    std::ifstream in(common_.file);
    if (!in) throw UsageError("cannot open " + common_.file);
    return load_network(common_.file);
  }

  void emit(const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (common_.out_path.empty()) {
      out_ << text;
    } else {
      std::ofstream f(common_.out_path);
      if (!f) throw UsageError("cannot write " + common_.out_path);
      f << text;
    }
  }

  void add_file(CLI::App* sub) {
    sub->add_option("file", common_.file, "Network file")->required();
  }

  void add_validate(CLI::App& app) {
    auto* sub = app.add_subcommand("validate", "Check the structural hypotheses");
    add_file(sub);
    sub->add_option("--rank-tol", rank_tol_, "Relative pivot tolerance for rank(B)");
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        ValidationOptions vo;
        vo.rank_tol = rank_tol_;
        const ValidationReport r = validate_network(net, vo);
        json j = header("validate");
        j["tolerances"] = {{"rank_tol", rank_tol_}};
        j["num_species"] = net.num_species();
        j["report"] = report_json(r);
        emit(j);
        return r.overall() ? kOk : kFailed;
      };
    });
  }

  void add_sim_options(CLI::App* sub, bool with_method) {
    sub->add_option("--x0", x0_text_, "Initial state, comma-separated in species order")->required();
    sub->add_option("--t-end", sim_.t_end, "Final time")->required()->check(CLI::PositiveNumber);
    sub->add_option("--abs-tol", sim_.abs_tol, "Absolute tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--rel-tol", sim_.rel_tol, "Relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--eps-neg", sim_.eps_neg, "Clamp threshold for roundoff dips below 0")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--step", sim_.initial_step, "Initial step (rk45) or fixed step (rk4)")
        ->check(CLI::NonNegativeNumber);
    if (with_method) {
      sub->add_option("--method", method_, "rk45 or rk4")->check(CLI::IsMember({"rk45", "rk4"}));
    }
  }

  json sim_tolerances() const {
    return {{"method", method_}, {"abs_tol", sim_.abs_tol}, {"rel_tol", sim_.rel_tol},
            {"eps_neg", sim_.eps_neg}, {"initial_step", sim_.initial_step}};
  }

  void add_simulate(CLI::App& app) {
    auto* sub = app.add_subcommand("simulate", "Integrate the network from x0");
    add_file(sub);
    add_sim_options(sub, true);
    sub->add_option("--out", common_.out_path, "Write the trajectory CSV here (summary JSON to stdout)");
    sub->add_option("--samples", samples_, "Extra evenly spaced dense-output times")
        ->check(CLI::NonNegativeNumber);
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        const Vector x0 = parse_vector(x0_text_, net.num_species(), "--x0");
        sim_.method = method_ == "rk4" ? Method::kRK4 : Method::kRK45;
        for (int k = 1; k <= samples_; ++k) sim_.output_times.push_back(sim_.t_end * k / (samples_ + 1));
        Trajectory traj = simulate(net, x0, sim_);
        std::optional<Vector> x_bar;
        try {
          x_bar = class_equilibrium(net, class_of(net, x0)).x_bar;
          annotate_lyapunov(net, *x_bar, traj);
        } catch (const ClassNotPositive&) {
        } catch (const NumericalError&) {
        }
        std::ostringstream csv;
        csv << std::setprecision(17) << "t";
        for (Index i = 0; i < net.num_species(); ++i) csv << ",x_" << (i + 1);
        csv << ",drift,V\n";
        for (std::size_t k = 0; k < traj.size(); ++k) {
          csv << traj.times[k];
          for (Index i = 0; i < net.num_species(); ++i) csv << "," << traj.states[k][i];
          csv << "," << traj.drift[k] << ",";
          if (!traj.lyapunov.empty()) csv << traj.lyapunov[k];
          csv << "\n";
        }
        if (common_.out_path.empty()) {
          out_ << csv.str();
          return kOk;
        }
        {
          std::ofstream f(common_.out_path);
          if (!f) throw UsageError("cannot write " + common_.out_path);
          f << csv.str();
        }
        json j = header("simulate");
        j["tolerances"] = sim_tolerances();
        j["samples"] = traj.size();
        j["accepted_steps"] = traj.accepted_steps;
        j["rejected_steps"] = traj.rejected_steps;
        j["max_drift"] = traj.max_drift();
        j["min_pre_clamp"] = traj.min_pre_clamp;
        j["final_state"] = to_json(traj.final_state());
        j["class_equilibrium"] = x_bar ? to_json(*x_bar) : json(nullptr);
        j["csv"] = common_.out_path;
        out_ << j.dump(2) << "\n";
        return kOk;
      };
    });
  }

  void add_equilibrium(CLI::App& app) {
    auto* sub = app.add_subcommand("equilibrium", "Positive equilibrium of a class");
    add_file(sub);
    sub->add_option("--class", class_text_, "Class anchor point, comma-separated")->required();
    sub->add_flag("--json", json_, "Print JSON instead of text");
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        const Vector p = parse_vector(class_text_, net.num_species(), "--class");
        const ClassEquilibriumOptions eo;
        const EquilibriumResult r = class_equilibrium(net, class_of(net, p), eo);
        if (!json_) {
          std::ostringstream text;
          text << std::setprecision(17);
          for (Index i = 0; i < r.x_bar.size(); ++i) {
            text << net.species_names()[static_cast<std::size_t>(i)] << " = " << r.x_bar[i] << "\n";
          }
          text << "field_residual = " << r.field_residual << "\n"
               << "class_residual = " << r.class_residual << "\n"
               << "iterations = " << r.iterations << "\n";
          if (common_.out_path.empty()) {
            out_ << text.str();
          } else {
            std::ofstream f(common_.out_path);
            f << text.str();
          }
          return kOk;
        }
        json j = header("equilibrium");
        j["tolerances"] = {{"gradient_tol", eo.coordinatize.gradient_tol},
                           {"residual_tol", eo.coordinatize.residual_tol},
                           {"field_tol", eo.field_tol},
                           {"kernel_tol", eo.kernel.tol}};
        j["species"] = net.species_names();
        j["x_bar"] = to_json(r.x_bar);
        j["field_residual"] = r.field_residual;
        j["class_residual"] = r.class_residual;
        j["log_residual"] = r.log_residual;
        j["iterations"] = r.iterations;
        j["anchor"] = to_json(r.anchor);
        emit(j);
        return kOk;
      };
    });
  }

  void add_probe_options(CLI::App* sub) {
    sub->add_option("--probes", probes_, "Random probes for the kappa check");
    sub->add_option("--seed", common_.seed, "Random seed");
  }

  void add_lyapunov(CLI::App& app) {
    auto* sub = app.add_subcommand("lyapunov", "Decrease certificate along a simulated trajectory");
    add_file(sub);
    add_sim_options(sub, false);
    add_probe_options(sub);
    sub->add_option("--slack", slack_, "Certificate slack")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        const Vector x0 = parse_vector(x0_text_, net.num_species(), "--x0");
        const ClassDescriptor cls = class_of(net, x0);
        const EquilibriumResult eq = class_equilibrium(net, cls);
        const KappaBound kb = kappa_bound(net, probes_, common_.seed);
        const Trajectory traj = simulate(net, x0, sim_);
        CertificateOptions co;
        co.slack = slack_;
        co.kappa = kb.kappa;
        const CertificateReport rep = decrease_certificate(net, eq.x_bar, traj, co);
        json j = header("lyapunov");
        j["tolerances"] = sim_tolerances();
        j["tolerances"]["slack"] = slack_;
        j["seed"] = common_.seed;
        j["x_bar"] = to_json(eq.x_bar);
        j["kappa"] = kb.kappa;
        j["checked_points"] = rep.checked_points;
        j["skipped_boundary"] = rep.skipped_boundary;
        j["max_violation"] = real(rep.max_violation);
        j["decrease_violation"] = real(rep.decrease_violation);
        j["monotonicity_violation"] = real(rep.monotonicity_violation);
        j["c_used"] = rep.c_used;
        j["pass"] = rep.pass;
        j["final_distance"] = (traj.final_state() - eq.x_bar).cwiseAbs().maxCoeff();
        const BoundaryAnalysis ba = class_boundary_check(net, cls);
        if (ba.has_boundary_equilibria) {
          const AttractionLevel al = attraction_level(net, cls, eq.x_bar);
          j["attraction_level"] = real(al.w0);
        }
        emit(j);
        return rep.pass ? kOk : kFailed;
      };
    });
  }

  void add_boundary(CLI::App& app) {
    auto* sub = app.add_subcommand("boundary", "Does the class contain boundary equilibria?");
    add_file(sub);
    sub->add_option("--class", class_text_, "Class anchor point, comma-separated")->required();
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        const Vector p = parse_vector(class_text_, net.num_species(), "--class");
        const BoundaryOptions bo;
        const BoundaryAnalysis ba = class_boundary_check(net, class_of(net, p), bo);
        json j = header("boundary");
        j["tolerances"] = {{"pivot_tol", bo.lp.tol}, {"pattern_cap", bo.pattern_cap}};
        j["has_boundary_equilibria"] = ba.has_boundary_equilibria;
        j["witness"] = ba.witness ? to_json(*ba.witness) : json(nullptr);
        j["witness_pattern"] = ba.witness_pattern;
        j["patterns_enumerated"] = ba.patterns_enumerated;
        j["zero_patterns_checked"] = ba.zero_patterns_checked;
        emit(j);
        return kOk;
      };
    });
  }

  void add_kappa(CLI::App& app) {
    auto* sub = app.add_subcommand("kappa", "Quadratic-form constant and its sampling check");
    add_file(sub);
    add_probe_options(sub);
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        const Network net = load();
        const KappaBound kb = kappa_bound(net, probes_, common_.seed);
        json j = header("kappa");
        j["tolerances"] = {{"eigenvalue_tol", 1e-12}};
        j["seed"] = common_.seed;
        j["kappa0"] = kb.kappa0;
        j["kappa"] = kb.kappa;
        j["sample_check"] = real(kb.sample_check);
        j["probes"] = kb.probes;
        j["violations"] = kb.violations;
        emit(j);
        return kb.violations == 0 ? kOk : kFailed;
      };
    });
  }

  void add_proofread(CLI::App& app) {
    auto* sub = app.add_subcommand("proofread", "Build the kinetic proofreading network and analyse a class");
    sub->add_option("--n", pr_.n, "Number of modification steps N")->required()->check(CLI::NonNegativeNumber);
    sub->add_option("--k1", pr_.k1, "Association rate")->required();
    sub->add_option("--kminus", kminus_text_, "N+1 dissociation rates, comma-separated")->required();
    sub->add_option("--kp", kp_text_, "N modification rates, comma-separated");
    sub->add_option("--emit", emit_path_, "Write the network file here");
    sub->add_option("--tstar", t_star_, "Total T (runs the pipeline with --mstar)");
    sub->add_option("--mstar", m_star_, "Total M");
    sub->add_option("--t-end", pipeline_t_end_, "Simulation horizon for the pipeline")->check(CLI::PositiveNumber);
    sub->add_option("--x0", x0_text_, "Initial state for the pipeline (default: the class anchor)");
    add_probe_options(sub);
    sub->add_option("--out", common_.out_path, "Write the report here");
    sub->callback([this] {
      action_ = [this] {
        sim_.t_end = pipeline_t_end_;
        pr_.k_minus = parse_list(kminus_text_, "--kminus");
        pr_.k_p = kp_text_.empty() ? std::vector<double>{} : parse_list(kp_text_, "--kp");
        const Network net = build_mckeithan(pr_);
        if (!emit_path_.empty()) {
          std::ofstream f(emit_path_);
          if (!f) throw UsageError("cannot write " + emit_path_);
          f << serialize_network(net);
        }
        const ValidationReport vr = validate_network(net);
        json j = header("proofread");
        j["seed"] = common_.seed;
        j["species"] = net.species_names();
        j["validation"] = report_json(vr);
        bool ok = vr.overall();
        if (t_star_ || m_star_) {
          if (!t_star_ || !m_star_) throw UsageError("--tstar and --mstar go together");
          const ClassDescriptor cls = proofreading_class(net, *t_star_, *m_star_);
          const BoundaryAnalysis ba = class_boundary_check(net, cls);
          const EquilibriumResult eq = class_equilibrium(net, cls);
          const Vector x0 = x0_text_.empty() ? cls.anchor_point : parse_vector(x0_text_, net.num_species(), "--x0");
          if ((cls.conservation_values - stoich_basis(net).dperp_basis.transpose() * x0).cwiseAbs().maxCoeff() >
              1e-9 * (1.0 + *t_star_ + *m_star_)) {
            throw UsageError("--x0 is not in the class given by --tstar/--mstar");
          }
          const KappaBound kb = kappa_bound(net, probes_, common_.seed);
          const Trajectory traj = simulate(net, x0, sim_);
          CertificateOptions co;
          co.kappa = kb.kappa;
          const CertificateReport rep = decrease_certificate(net, eq.x_bar, traj, co);
          j["tolerances"] = sim_tolerances();
          j["tolerances"]["slack"] = co.slack;
          j["boundary"] = {{"has_boundary_equilibria", ba.has_boundary_equilibria},
                           {"patterns_enumerated", ba.patterns_enumerated}};
          j["equilibrium"] = {{"x_bar", to_json(eq.x_bar)}, {"field_residual", eq.field_residual},
                              {"iterations", eq.iterations}};
          j["simulation"] = {{"t_end", sim_.t_end},
                             {"final_state", to_json(traj.final_state())},
                             {"final_distance", (traj.final_state() - eq.x_bar).cwiseAbs().maxCoeff()},
                             {"max_drift", traj.max_drift()}};
          j["certificate"] = {{"kappa", kb.kappa},
                              {"c_used", rep.c_used},
                              {"checked_points", rep.checked_points},
                              {"max_violation", real(rep.max_violation)},
                              {"pass", rep.pass}};
          ok = ok && !ba.has_boundary_equilibria && rep.pass;
        }
        emit(j);
        return ok ? kOk : kFailed;
      };
    });
  }

  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  std::function<int()> action_;

  double rank_tol_ = 1e-9;
  std::string x0_text_;
  std::string class_text_;
  SimOptions sim_;
  std::string method_ = "rk45";
  int samples_ = 0;
  bool json_ = false;
  std::size_t probes_ = 100000;
  double slack_ = 1e-8;
  ProofreadingRates pr_;
  std::string kminus_text_;
  std::string kp_text_;
  std::string emit_path_;
  std::optional<double> t_star_;
  std::optional<double> m_star_;
  double pipeline_t_end_ = 100.0;
};

}  // namespace

const char* grammar_text() { return kGrammar; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  return runner.main(args);
}

}  // namespace crnzero::cli
