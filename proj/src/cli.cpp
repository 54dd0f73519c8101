#include "mongeampere/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mongeampere/analysis_checks.hpp"
#include "mongeampere/error.hpp"
#include "mongeampere/problem_io.hpp"
#include "mongeampere/singular_lab.hpp"

namespace mongeampere::cli {

namespace {

struct Options {
  std::string input;
  std::string solution;
  double tol = 1e-8;
  int max_sweeps = 500;
  int per_edge = 64;
  std::string output = "json";
  bool parallel = false;
  int n = 3;
  bool check_exponent = false;
  std::vector<double> grad;
  std::vector<double> hess;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_input, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolverConfig solver_config(const Options& o) {
  SolverConfig c;
  c.mass_tolerance = o.tol;
  c.max_sweeps = o.max_sweeps;
  c.execution = o.parallel ? Execution::parallel : Execution::sequential;
  return c;
}

int cmd_measure(const Options& o, std::ostream& out) {
  const ProblemDocument doc = parse_problem(read_file(o.input), o.per_edge);
  std::vector<double> heights;
  if (!o.solution.empty()) {
    heights = parse_result_heights(read_file(o.solution));
  } else if (doc.heights) {
    heights = *doc.heights;
  } else {
    throw Error(Errc::invalid_input, "measure needs node heights (a 'heights' field or --solution)");
  }
  if (heights.size() != doc.problem.nodes.size()) throw Error(Errc::invalid_input, "one height per node required");
  const NodalConvexFunction f(doc.problem.domain, doc.problem.boundary, doc.problem.nodes, std::move(heights));
  if (o.output == "csv") {
    out << write_cells_csv(f);
    return kExitOk;
  }
  const MAMeasure m = ma_masses(f, o.parallel ? Execution::parallel : Execution::sequential);
  JsonWriter w;
  w.begin_object().key("masses").array(m.masses).key("total").value(m.total).end_object();
  out << w.str();
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const ProblemDocument doc = parse_problem(read_file(o.input), o.per_edge);
  if (!doc.has_masses) throw Error(Errc::invalid_input, "solve needs 'masses'");
  const SolveReport r = solve_dirac(doc.problem, solver_config(o));
  out << (o.output == "csv" ? write_cells_csv(r.solution) : write_result(r));
  return r.converged ? kExitOk : kExitNotConverged;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ProblemDocument doc = parse_problem(read_file(o.input), o.per_edge);
  if (!doc.has_masses) throw Error(Errc::invalid_input, "verify needs 'masses'");
  const SolverConfig cfg = solver_config(o);
  const SolveReport full = solve_dirac(doc.problem, cfg);
  DiracProblem half = doc.problem;
  for (double& a : half.target_masses) a *= 0.5;
  const SolveReport lighter = solve_dirac(half, cfg);
  const bool converged = full.converged && lighter.converged;

  const ComparisonReport cmp = check_comparison(full.solution, lighter.solution, 2.0 * o.tol);
  const bool zero_boundary = std::all_of(doc.problem.boundary.begin(), doc.problem.boundary.end(),
                                         [](const BoundarySample& s) { return s.value == 0.0; });
  bool alex_ok = true;
  if (zero_boundary) alex_ok = alexandrov_bound(full.solution).overall;
  const NodalConvexFunction env = convex_envelope(doc.problem.domain, doc.problem.boundary, doc.problem.nodes);
  const MAMeasure em = ma_masses(env);
  const double env_max = em.masses.empty() ? 0.0 : *std::max_element(em.masses.begin(), em.masses.end());
  const bool env_ok = env_max <= 1e-10;
  const bool passed = cmp.hypothesis.overall && cmp.conclusion.overall && alex_ok && env_ok;

  JsonWriter w;
  w.begin_object();
  w.key("converged").value(converged);
  w.key("comparison").begin_object();
  w.key("hypothesis").value(cmp.hypothesis.overall);
  w.key("conclusion").value(cmp.conclusion_checked && cmp.conclusion.overall);
  w.end_object();
  w.key("alexandrov").begin_object();
  w.key("checked").value(zero_boundary);
  w.key("satisfied").value(alex_ok);
  w.end_object();
  w.key("envelope_max_mass").value(env_max);
  w.key("envelope_zero").value(env_ok);
  w.key("passed").value(passed);
  w.end_object();
  out << w.str();
  if (!converged) return kExitNotConverged;
  return passed ? kExitOk : kExitCheckFailed;
}

int cmd_pogorelov(const Options& o, std::ostream& out) {
  OdeConfig cfg;
  cfg.rtol = o.tol;
  const ODEProfile p = integrate_pogorelov(o.n, cfg);
  if (o.output == "csv") {
    out << "t,h,h_prime,h_double_prime\n";
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.grid[k], p.h[k], p.h_prime[k],
                    p.h_double_prime[k]);
      out << buf;
    }
    return kExitOk;
  }
  JsonWriter w;
  w.begin_object();
  w.key("n").value(o.n);
  w.key("constant").value(p.constant);
  w.key("blow_up_time").value(p.blow_up_time.value_or(0.0));
  w.key("ode_residual").value(ode_residual(p));
  w.key("first_integral_defect").value(pogorelov_first_integral_defect(p));
  w.key("grid_points").value(static_cast<long>(p.grid.size()));
  w.end_object();
  out << w.str();
  return kExitOk;
}

int cmd_wang(const Options& o, std::ostream& out) {
  OdeConfig cfg;
  cfg.rtol = o.tol;
  const ODEProfile p = integrate_wang(cfg);
  if (o.output == "csv") {
    out << "t,h,h_prime,h_double_prime\n";
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.grid[k], p.h[k], p.h_prime[k],
                    p.h_double_prime[k]);
      out << buf;
    }
    return kExitOk;
  }
  const auto at0 = profile_at(p, 0.0);
  const auto at1 = profile_at(p, 1.0);
  JsonWriter w;
  w.begin_object();
  w.key("h_double_prime_0").value(at0[2]);
  w.key("h_1").value(at1[0]);
  w.key("ode_residual").value(ode_residual(p));
  if (o.check_exponent) {
    std::vector<std::pair<double, double>> samples;
    for (double x2 = 1e-6; x2 <= 1e-2 * (1.0 + 1e-9); x2 *= 10.0) {
      samples.emplace_back(x2, wang_eval(p, 0.0, x2).hessian(1, 1));
    }
    w.key("u22_exponent").value(fit_power_exponent(samples));
  }
  w.end_object();
  out << w.str();
  return kExitOk;
}

int cmd_gauss(const Options& o, std::ostream& out) {
  if (o.grad.size() != 2) throw Error(Errc::invalid_input, "--grad needs gx,gy");
  if (o.hess.size() != 3) throw Error(Errc::invalid_input, "--hess needs h11,h12,h22");
  SymMatrix h(2);
  h.set(0, 0, o.hess[0]);
  h.set(0, 1, o.hess[1]);
  h.set(1, 1, o.hess[2]);
  JsonWriter w;
  w.begin_object().key("curvature").value(gauss_curvature({o.grad[0], o.grad[1]}, h)).end_object();
  out << w.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Alexandrov solutions of the planar Monge-Ampere equation", "matool"};
  app.require_subcommand(1);

  auto problem_opts = [&](CLI::App* c, bool solver) {
    c->add_option("--input", o.input, "problem document (JSON)")->required();
    c->add_option("--boundary-samples-per-edge", o.per_edge, "samples per edge for quadratic data")
        ->check(CLI::PositiveNumber);
    c->add_flag("--parallel", o.parallel, "evaluate cells on several threads");
    if (solver) {
      c->add_option("--tol", o.tol, "relative mass tolerance")->check(CLI::PositiveNumber);
      c->add_option("--max-sweeps", o.max_sweeps, "sweep limit")->check(CLI::PositiveNumber);
    }
  };
  auto output_opt = [&](CLI::App* c) {
    c->add_option("--output", o.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* measure = app.add_subcommand("measure", "Monge-Ampere masses of a nodal function");
  problem_opts(measure, false);
  measure->add_option("--solution", o.solution, "result document providing the heights");
  output_opt(measure);

  CLI::App* solve = app.add_subcommand("solve", "solve the Dirac-mass Dirichlet problem");
  problem_opts(solve, true);
  output_opt(solve);

  CLI::App* verify = app.add_subcommand("verify", "comparison, Alexandrov bound and envelope checks");
  problem_opts(verify, true);

  CLI::App* pog = app.add_subcommand("pogorelov", "Pogorelov singular profile");
  pog->add_option("--n", o.n, "dimension (>= 3)");
  pog->add_option("--tol", o.tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
  output_opt(pog);

  CLI::App* wang = app.add_subcommand("wang", "Wang boundary example");
  wang->add_flag("--check-exponent", o.check_exponent, "fit the exponent of u_22 along x1 = 0");
  wang->add_option("--tol", o.tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
  output_opt(wang);

  CLI::App* gauss = app.add_subcommand("gauss", "Gauss curvature of a graph from its gradient and Hessian");
  gauss->add_option("--grad", o.grad, "gx,gy")->delimiter(',')->required();
  gauss->add_option("--hess", o.hess, "h11,h12,h22")->delimiter(',')->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  // The integrators want a tighter default than the solver.
  const bool ode = app.got_subcommand(pog) || app.got_subcommand(wang);
  if (ode && (app.got_subcommand(pog) ? pog : wang)->count("--tol") == 0) o.tol = 1e-10;

  try {
    if (app.got_subcommand(measure)) return cmd_measure(o, out);
    if (app.got_subcommand(solve)) return cmd_solve(o, out);
    if (app.got_subcommand(verify)) return cmd_verify(o, out);
    if (app.got_subcommand(pog)) return cmd_pogorelov(o, out);
    if (app.got_subcommand(wang)) return cmd_wang(o, out);
    return cmd_gauss(o, out);
  } catch (const Error& e) {
    err << "matool: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "matool: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace mongeampere::cli
