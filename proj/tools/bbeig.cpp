// bbeig: limit | solve | optimize | sweep | verify.
//
// Settings come from the config file, then BBEIG_OUTPUT_DIR / BBEIG_WORKERS,
// then command-line flags (--set section.key=value and the shortcuts below).

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bbeig/acceptance.hpp"
#include "bbeig/asymptotics.hpp"
#include "bbeig/config.hpp"
#include "bbeig/eigensolver.hpp"
#include "bbeig/error.hpp"
#include "bbeig/output.hpp"
#include "bbeig/placement.hpp"

namespace {

using namespace bbeig;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
  int workers = 0;
  bool no_timestamp = false;
  bool no_plots = false;
};

RunConfig build_config(const CommonOptions& opt, bool default_disk) {
  RunConfig c;
  if (!opt.config_path.empty()) {
    c = load_config(opt.config_path);
  } else if (default_disk) {
    c.shape = "disk(0,0,1)";
  }
  if (const char* dir = std::getenv("BBEIG_OUTPUT_DIR"); dir && *dir) c.directory = dir;
  if (const char* w = std::getenv("BBEIG_WORKERS"); w && *w) set_config_value(c, "run.workers", w);
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    set_config_value(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!opt.output.empty()) c.directory = opt.output;
  if (opt.workers > 0) c.workers = opt.workers;
  if (opt.no_timestamp) c.timestamp = false;
  if (opt.no_plots) c.plots = false;
  validate(c);
  return c;
}

std::string out_path(const RunConfig& c, const std::string& name) { return (fs::path(c.directory) / name).string(); }

void note(const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); }

int run_limit(const RunConfig& c) {
  const auto sol = solve_limit_problem(c.weight_params());
  write_file(out_path(c, "limit.json"), limit_json(sol, make_metadata(c, "limit")));
  std::printf("lambda0 %.15g\nA %.15g\nB %.15g\ngamma %.15g\nPhi %.15g\ndecay rate %.15g\n", sol.lambda0, sol.A,
              sol.B, sol.gamma, sol.phi, sol.decay_rate());
  return 0;
}

struct Setup {
  Shape shape;
  DomainPtr domain;
  double h;
};

Setup make_setup(const RunConfig& c) {
  Shape shape = c.domain();
  const double h = c.grid_h(c.eps);
  return {shape, build_domain(shape, make_grid(shape, h)), h};
}

EigenSummary summary_for(const RunConfig& c, const Setup& s) {
  EigenSummary e;
  e.shape = c.shape;
  e.eps = c.eps;
  e.h = s.h;
  e.unknowns = s.domain->dof_count();
  return e;
}

int run_solve(const RunConfig& c) {
  const Setup s = make_setup(c);
  const Point center = c.center ? *c.center : incenter(*s.domain).q;
  if (!admissible(*s.domain, center, c.eps))
    throw ConfigError("run.center: the ball of measure eps around the center does not fit in the domain");
  const double dim = s.shape.dimension();
  auto stiffness = std::make_shared<const StiffnessOperator>(assemble(s.domain));
  PencilSolver solver(stiffness, c.eigen_options());
  const auto weight = rasterize_weight(*s.domain, BallSpec::with_measure(s.shape.dimension(), center, c.eps),
                                       c.m_bar, c.m_under, c.subsamples);
  const EigenResult r = solver.solve(weight);
  EigenSummary e = summary_for(c, s);
  e.center = center;
  e.dist = s.domain->distance_at(center);
  e.lambda = r.lambda;
  e.lambda_tilde = r.lambda * std::pow(c.eps, 2.0 / dim);
  e.residual = r.residual;
  e.iterations = r.iterations;
  const Metadata meta = make_metadata(c, "solve");
  write_file(out_path(c, "solve.json"), eigen_json(e, meta));
  write_file(out_path(c, "distance.csv"), to_csv(distance_table(*s.domain), meta));
  std::printf("center (%.10g, %.10g)\nlambda %.15g\nlambda_tilde %.15g\nresidual %.3e\n", center[0], center[1],
              e.lambda, e.lambda_tilde, e.residual);
  return 0;
}

int run_optimize(const RunConfig& c) {
  const Setup s = make_setup(c);
  PlacementProblem problem(s.domain, c.eps, c.m_bar, c.m_under, c.placement_settings());
  const PlacementResult r = optimize_center(problem);
  EigenSummary e = summary_for(c, s);
  e.center = r.center;
  e.dist = s.domain->distance_at(r.center);
  e.lambda = r.lambda;
  e.lambda_tilde = r.lambda * std::pow(c.eps, 2.0 / s.shape.dimension());
  e.residual = r.eigen.residual;
  e.iterations = r.eigen.iterations;
  e.evaluations = r.evaluations;
  e.accepted_moves = r.accepted_moves;
  const Metadata meta = make_metadata(c, "optimize");
  CsvTable trace;
  trace.header = {"x", "y", "lambda", "accepted"};
  for (const auto& t : r.trace)
    trace.rows.push_back({csv_number(t.center[0]), csv_number(t.center[1]), csv_number(t.lambda),
                          t.accepted ? "1" : "0"});
  write_file(out_path(c, "optimize.json"), eigen_json(e, meta));
  write_file(out_path(c, "trace.csv"), to_csv(trace, meta));
  std::printf("center (%.10g, %.10g)\nd %.10g\nlambda %.15g\nevaluations %d\n", r.center[0], r.center[1], e.dist,
              r.lambda, r.evaluations);
  return 0;
}

void write_sweep_plots(const RunConfig& c, const Shape& shape, const std::vector<AsymptoticRecord>& records,
                       const ExpansionReport* report, const Metadata& meta, const std::string& prefix) {
  Series gap{"gap", {}, {}}, ratio{"ratio", {}, {}}, psi{"psi_tilde", {}, {}}, psi_ref{"2 kappa d_max", {}, {}};
  for (const auto& r : records) {
    if (!r.ok()) continue;
    if (r.gap > 0.0) {
      gap.x.push_back(r.beta);
      gap.y.push_back(r.gap);
    }
    ratio.x.push_back(r.eps);
    ratio.y.push_back(r.ratio);
    psi.x.push_back(r.eps);
    psi.y.push_back(r.psi_tilde);
  }
  std::vector<Series> gap_series{gap};
  if (report && report->fit.points >= 2 && !gap.x.empty()) {
    Series fit{"fit", {}, {}, false, true};
    for (double b : gap.x) {
      fit.x.push_back(b);
      fit.y.push_back(std::exp(report->fit.intercept + report->fit.slope * b));
    }
    gap_series.push_back(fit);
    for (double e : psi.x) {
      psi_ref.x.push_back(e);
      psi_ref.y.push_back(report->rate_reference);
    }
  }
  write_file(out_path(c, prefix + "gap.svg"),
             svg_plot({"lambda_tilde - lambda0_h", "beta", "gap", true, gap_series}, meta));
  write_file(out_path(c, prefix + "ratio.svg"), svg_plot({"gap / correction", "eps", "ratio", false, {ratio}}, meta));
  write_file(out_path(c, prefix + "psi.svg"),
             svg_plot({"psi_tilde", "eps", "psi_tilde", false, {psi, psi_ref}}, meta));
  write_file(out_path(c, prefix + "trajectory.svg"), svg_trajectory(shape, records, meta));
}

int run_sweep(const RunConfig& c) {
  const Shape shape = c.domain();
  const auto sol = solve_limit_problem(c.weight_params());
  const double finest = c.eps_list.back();
  const double d_max = incenter(*build_domain(shape, make_grid(shape, c.grid_h(finest)))).d_max;
  const Metadata meta = make_metadata(c, "sweep");
  const auto records = sweep(shape, sol, c.sweep_settings(), [&](const std::vector<AsymptoticRecord>& done) {
    note("  " + std::to_string(done.size()) + "/" + std::to_string(c.eps_list.size()) + " rows");
    write_file(out_path(c, "records.csv"), to_csv(records_table(done), meta));
  });
  write_file(out_path(c, "records.csv"), to_csv(records_table(records), meta));
  ExpansionReport report;
  bool have_report = true;
  try {
    report = expansion_report(records, sol, d_max);
  } catch (const ConfigError& e) {
    note(std::string("expansion report skipped: ") + e.what());
    have_report = false;
  }
  const auto checks = sweep_property_checks(records, report, sol, d_max);
  write_file(out_path(c, "sweep.json"), sweep_json(records, report, sol, checks, meta));
  if (c.plots) write_sweep_plots(c, shape, records, have_report ? &report : nullptr, meta, "");

  for (const auto& w : report.warnings) note("warning: " + w);
  bool all = true;
  for (const auto& ch : checks) {
    std::printf("%s %s: %s\n", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
    all = all && ch.passed;
  }
  for (const auto& r : records)
    if (!r.ok()) throw SolverError("eps " + format_double(r.eps) + ": " + r.error);
  return all ? 0 : 1;
}

int run_verify(const RunConfig& c, const std::vector<int>& only) {
  AcceptanceOptions options = AcceptanceOptions::from_config(c);
  options.log = note;
  AcceptanceSuite suite(options);
  std::vector<CriterionResult> results;
  auto report = [&](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    results.push_back(r);
  };
  if (only.empty()) {
    suite.run_all(report);
  } else {
    for (int id : only) report(suite.run(id));
  }

  const Metadata meta = make_metadata(c, "verify");
  std::vector<PropertyCheck> checks;
  for (const auto& r : results)
    checks.push_back({"criterion " + std::to_string(r.id) + " " + r.name, r.passed, r.detail});
  write_file(out_path(c, "acceptance.json"), checks_json(checks, meta));
  for (const auto& [descriptor, run] : suite.sweeps()) {
    std::string tag;
    for (char ch : descriptor)
      if (std::isalnum(static_cast<unsigned char>(ch))) tag += ch;
    write_file(out_path(c, "acceptance_" + tag + ".csv"), to_csv(records_table(run.records), meta));
    if (c.plots)
      write_sweep_plots(c, parse_shape(descriptor), run.records, run.report ? &*run.report : nullptr, meta,
                        "acceptance_" + tag + "_");
  }

  for (const auto& r : results)
    if (!r.passed) {
      std::printf("first failing check: criterion %d (%s)\n", r.id, r.name.c_str());
      return 1;
    }
  std::printf("all %zu criteria passed\n", results.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal eigenvalues with small favourable balls: limit problem, solves, sweeps, acceptance"};
  app.set_version_flag("--version", bbeig::version_string());
  app.require_subcommand(1);

  CommonOptions opt;
  std::vector<int> only;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config_path, "config file")->check(CLI::ExistingFile);
    sub->add_option("--set", opt.sets, "override section.key=value (repeatable)");
    sub->add_option("-o,--output", opt.output, "output directory");
    sub->add_option("-j,--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", opt.no_timestamp, "omit the timestamp from SVG metadata");
    sub->add_flag("--no-plots", opt.no_plots, "skip SVG plots");
  };
  auto* limit = app.add_subcommand("limit", "solve the limit problem: lambda0, gamma, Phi");
  auto* solve = app.add_subcommand("solve", "principal eigenpair for one ball center");
  auto* optimize = app.add_subcommand("optimize", "optimal ball center for run.eps");
  auto* sweep_cmd = app.add_subcommand("sweep", "asymptotic sweep over sweep.eps_list");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* s : {limit, solve, optimize, sweep_cmd, verify}) add_common(s);
  verify->add_option("--criteria", only, "run only these criterion ids")->delimiter(',')->check(CLI::Range(1, 12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }

  try {
    const bool is_verify = verify->parsed();
    const RunConfig config = build_config(opt, is_verify);
    ensure_writable(config.directory);
    if (limit->parsed()) return run_limit(config);
    if (solve->parsed()) return run_solve(config);
    if (optimize->parsed()) return run_optimize(config);
    if (sweep_cmd->parsed()) return run_sweep(config);
    return run_verify(config, only);
  } catch (const bbeig::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::solver_failure);
  }
}
