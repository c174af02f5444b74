#include "bbeig/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "bbeig/error.hpp"

namespace bbeig {

namespace {

std::string printf_string(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double classical_lambda(const Shape& shape, double h, const EigenOptions& options) {
  auto domain = build_domain(shape, make_grid(shape, h));
  auto stiffness = std::make_shared<const StiffnessOperator>(assemble(domain));
  PencilSolver solver(stiffness, options);
  return solver.solve(constant_weight(*domain, 1.0)).lambda;
}

CriterionResult classical_spectrum(const EigenOptions& options) {
  CriterionResult r;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  struct Case {
    const char* name;
    Shape shape;
    double exact;
  };
  const Case cases[] = {{"interval", Shape::interval(0.0, 1.0), pi2}, {"square", Shape::unit_square(), 2.0 * pi2}};
  const double hs[] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  r.passed = true;
  for (const auto& c : cases) {
    double err[3];
    for (int i = 0; i < 3; ++i) err[i] = std::abs(classical_lambda(c.shape, hs[i], options) / c.exact - 1.0);
    const double p1 = std::log2(err[0] / err[1]);
    const double p2 = std::log2(err[1] / err[2]);
    const bool ok = err[2] < 2e-3 && p1 >= 1.8 && p1 <= 2.2 && p2 >= 1.8 && p2 <= 2.2;
    r.passed = r.passed && ok;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += printf_string("%s rel err %.3e at h=1/128, orders %.3f %.3f", c.name, err[2], p1, p2);
  }
  return r;
}

CriterionResult closed_form_limit() {
  CriterionResult r;
  const auto sol = solve_limit_problem(WeightParams::standard(1, 1.0, 1.0));
  const double exact = std::numbers::pi * std::numbers::pi / 4.0;
  const double err = std::abs(sol.lambda0 - exact);
  r.passed = err <= 1e-10;
  r.detail = printf_string("lambda0 %.15g, |lambda0 - pi^2/4| = %.2e", sol.lambda0, err);
  return r;
}

CriterionResult discrete_characterization(const AcceptanceOptions& options) {
  CriterionResult r;
  const WeightParams params = WeightParams::standard(2, 1.0, 1.0);
  const auto sol = solve_limit_problem(params);
  const double rho = sol.rho();
  const int subsamples = options.sweep.placement.subsamples;
  r.passed = true;
  for (double radius : {8.0, 12.0, 16.0}) {
    double lam[2];
    const int cells[2] = {8, 16};
    for (int i = 0; i < 2; ++i) {
      if (options.log) options.log(printf_string("discrete limit R=%g h=rho/%d", radius, cells[i]));
      lam[i] = discrete_limit_reference(params, rho / cells[i], {0.0, 0.0}, radius, subsamples,
                                        options.sweep.placement.eigen)
                   .lambda;
    }
    const double extrapolated = (4.0 * lam[1] - lam[0]) / 3.0;
    const double rel = extrapolated / sol.lambda0 - 1.0;
    r.passed = r.passed && std::abs(rel) <= 5e-3;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += printf_string("R=%g extrapolated %.8g (rel %.2e)", radius, extrapolated, rel);
  }
  r.detail += printf_string("; lambda0 %.12g", sol.lambda0);
  return r;
}

CriterionResult bathtub_optimality(const AcceptanceOptions& options) {
  CriterionResult r;
  // 8x8 interior nodes of unit spacing; measure 4 cells.
  const Shape shape(Rectangle{{0.0, 0.0}, {9.0, 9.0}});
  auto domain = build_domain(shape, make_grid(shape, 1.0, {0.0, 0.0}));
  if (domain->dof_count() != 64) throw SolverError("bathtub grid does not have 64 unknowns");
  const double m_bar = options.m_bar;
  const double m_under = options.m_under;
  const double eps = 4.0;

  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GridFunction u(domain->grid().node_count(), 0.0);
  std::vector<double> u2(64);
  double total = 0.0;
  for (int d = 0; d < 64; ++d) {
    const double v = unit(rng);
    u[domain->node_of_dof(d)] = v;
    u2[d] = v * v;
    total += v * v;
  }
  const WeightField bath = bathtub_rearrangement(*domain, u, eps, m_bar, m_under);
  const double best_bath = weighted_mass(*domain, bath, u);

  double best_set = -1e300;
  long long subsets = 0;
  for (int a = 0; a < 64; ++a)
    for (int b = a + 1; b < 64; ++b)
      for (int c = b + 1; c < 64; ++c)
        for (int d = c + 1; d < 64; ++d) {
          const double mass = (m_bar + m_under) * (u2[a] + u2[b] + u2[c] + u2[d]) - m_under * total;
          best_set = std::max(best_set, mass);
          ++subsets;
        }
  const double tol = 1e-12 * std::max(1.0, std::abs(best_bath));
  const bool exhaustive_ok = best_bath >= best_set - tol && std::abs(best_bath - best_set) <= tol;

  int dominated = 0;
  double worst_margin = 1e300;
  const double budget = (m_bar + m_under) * eps;
  for (int trial = 0; trial < 100; ++trial) {
    WeightField w = bath;
    double excess = 0.0;
    for (auto& v : w.values) {
      v = -m_under + (m_bar + m_under) * unit(rng);
      excess += v + m_under;
    }
    if (excess > budget)
      for (auto& v : w.values) v = -m_under + (v + m_under) * (budget / excess);
    const double mass = weighted_mass(*domain, w, u);
    worst_margin = std::min(worst_margin, best_bath - mass);
    if (mass <= best_bath + tol) ++dominated;
  }
  r.passed = exhaustive_ok && dominated == 100;
  r.detail = printf_string("rearrangement %.12g, best of %lld sets %.12g; %d/100 random weights dominated (min margin %.3e)",
                           best_bath, subsets, best_set, dominated, worst_margin);
  return r;
}

CriterionResult special_function_integrity() {
  CriterionResult r;
  double wronskian = 0.0;
  for (int twice : {-1, 0, 1}) {
    const BesselOrder nu(twice);
    for (int i = 0; i <= 400; ++i) {
      const double x = 0.1 * std::pow(300.0, i / 400.0);
      const double w = bessel_i(nu, x) * bessel_deriv(BesselKind::K, nu, x) -
                       bessel_deriv(BesselKind::I, nu, x) * bessel_k(nu, x);
      wronskian = std::max(wronskian, std::abs(x * w + 1.0));
    }
  }
  // J is compared absolutely (it has zeros), I and K relatively. The K series
  // cancels like e^{2x}, which limits its useful range.
  double series = 0.0;
  for (int twice : {-1, 1, 3}) {
    const BesselOrder nu(twice);
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.1 + i * (9.9 / 200.0);
      series = std::max(series, std::abs(bessel_j(nu, x) - bessel_j_series(nu.value(), x)));
      const double iv = bessel_i_series(nu.value(), x);
      series = std::max(series, std::abs(bessel_i(nu, x) / iv - 1.0));
    }
  }
  for (int twice : {-3, -1, 1, 3}) {
    const BesselOrder nu(twice);
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.1 + i * (4.9 / 200.0);
      series = std::max(series, std::abs(bessel_k(nu, x) / bessel_k_series(nu.value(), x) - 1.0));
    }
  }
  r.passed = wronskian <= 1e-8 && series <= 1e-10;
  r.detail = printf_string("max |x W + 1| %.2e on [0.1, 30]; max closed form vs series %.2e", wronskian, series);
  return r;
}

const PropertyCheck* find_check(const SweepRun& run, const std::string& name) {
  for (const auto& c : run.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Conjunction of named sweep checks; a failed row fails every criterion.
void apply_checks(CriterionResult& r, const SweepRun& run, std::initializer_list<const char*> names) {
  r.passed = true;
  if (const auto* rows = find_check(run, "all rows succeeded")) {
    r.passed = false;
    r.detail = rows->detail;
    for (const auto& rec : run.records)
      if (!rec.ok()) {
        r.detail += printf_string("; eps %g: %s", rec.eps, rec.error.c_str());
        break;
      }
    r.detail += "; ";
  }
  for (const char* name : names) {
    const auto* c = find_check(run, name);
    if (!r.detail.empty() && r.detail.back() != ' ') r.detail += "; ";
    if (!c) {
      r.passed = false;
      r.detail += std::string(name) + ": not evaluated";
      continue;
    }
    r.passed = r.passed && c->passed;
    r.detail += (c->passed ? "" : "FAILED ") + c->name + " (" + c->detail + ")";
  }
}

const AsymptoticRecord* row_for(const SweepRun& run, double eps) {
  for (const auto& r : run.records)
    if (std::abs(r.eps - eps) <= 1e-12 * eps) return &r;
  return nullptr;
}

}  // namespace

AcceptanceOptions AcceptanceOptions::from_config(const RunConfig& config) {
  AcceptanceOptions o;
  o.sweep = config.sweep_settings();
  o.m_bar = config.m_bar;
  o.m_under = config.m_under;
  return o;
}

std::string format_result(const CriterionResult& r) {
  return printf_string("criterion %d %s %s: ", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str()) + r.detail +
         printf_string(" (%.1f s)", r.seconds);
}

AcceptanceSuite::AcceptanceSuite(AcceptanceOptions options) : options_(std::move(options)) {}

const std::vector<AcceptanceSuite::Info>& AcceptanceSuite::criteria() {
  static const std::vector<Info> list = {
      {1, "classical spectrum"},        {2, "closed-form limit eigenvalue"}, {3, "discrete limit characterization"},
      {4, "bathtub optimality"},        {5, "concentric ball on the disk"},  {6, "incenter concentration"},
      {7, "eigenvalue convergence"},    {8, "psi_tilde limit and bounds"},   {9, "expansion rate"},
      {10, "blow-up convergence"},      {11, "residual boundedness"},        {12, "special-function integrity"},
  };
  return list;
}

const SweepRun& AcceptanceSuite::sweep_for(const std::string& descriptor, bool blowup) {
  auto it = sweeps_.find(descriptor);
  if (it != sweeps_.end()) return it->second;

  const Shape shape = parse_shape(descriptor);
  SweepRun run;
  run.shape = descriptor;
  run.sol = solve_limit_problem(WeightParams::standard(shape.dimension(), options_.m_bar, options_.m_under));

  SweepSettings settings = options_.sweep;
  settings.blowup_analysis = blowup;
  const double finest = *std::min_element(settings.eps_list.begin(), settings.eps_list.end());
  const double h = settings.fixed_h > 0.0 ? settings.fixed_h
                                          : ball_radius(shape.dimension(), finest) / settings.cells_per_radius;
  run.d_max = incenter(*build_domain(shape, make_grid(shape, h))).d_max;
  if (!(settings.placement.stride > 0.0)) settings.placement.stride = std::min(0.125, run.d_max / 4.0);

  if (options_.log) options_.log("sweep " + descriptor);
  run.records = sweep(shape, run.sol, settings, [&](const std::vector<AsymptoticRecord>& done) {
    if (options_.log && !done.empty())
      options_.log(printf_string("  %s: %zu/%zu rows", descriptor.c_str(), done.size(), settings.eps_list.size()));
  });
  try {
    run.report = expansion_report(run.records, run.sol, run.d_max);
  } catch (const ConfigError&) {
    // Fewer than four usable rows; the checks below still run.
  }
  run.checks = sweep_property_checks(run.records, run.report.value_or(ExpansionReport{}), run.sol, run.d_max);
  return sweeps_.emplace(descriptor, std::move(run)).first->second;
}

CriterionResult AcceptanceSuite::evaluate(int id) {
  const std::string disk = "disk(0,0,1)";
  switch (id) {
    case 1:
      return classical_spectrum(options_.sweep.placement.eigen);
    case 2:
      return closed_form_limit();
    case 3:
      return discrete_characterization(options_);
    case 4:
      return bathtub_optimality(options_);
    case 5: {
      CriterionResult r;
      const auto& run = sweep_for(disk, true);
      r.passed = true;
      for (double eps : {0.05, 0.02}) {
        const AsymptoticRecord* rec = row_for(run, eps);
        AsymptoticRecord extra;
        if (!rec) {
          SweepSettings s = options_.sweep;
          s.blowup_analysis = false;
          if (!(s.placement.stride > 0.0)) s.placement.stride = 0.125;
          extra = analyze_eps(parse_shape(disk), run.sol, eps, s);
          rec = &extra;
        }
        if (!r.detail.empty()) r.detail += "; ";
        if (!rec->ok()) {
          r.passed = false;
          r.detail += printf_string("eps %g failed: %s", eps, rec->error.c_str());
          continue;
        }
        const double off = std::hypot(rec->center[0], rec->center[1]);
        r.passed = r.passed && off <= 2.0 * rec->h;
        r.detail += printf_string("eps %g |x - 0| = %.3e <= 2h = %.3e", eps, off, 2.0 * rec->h);
      }
      return r;
    }
    case 6: {
      CriterionResult r;
      r.passed = true;
      for (const char* shape : {"square", "rectangle(0,0,2,1)", "dumbbell"}) {
        const auto& run = sweep_for(shape, false);
        CriterionResult part;
        apply_checks(part, run, {"distance nondecreasing", "distance within 5% of inradius"});
        r.passed = r.passed && part.passed;
        if (!r.detail.empty()) r.detail += " | ";
        r.detail += std::string(shape) + ": " + part.detail;
      }
      if (!r.passed) r.detail += " | refine the grid (smaller h or more cells_per_radius) or the optimizer stride";
      return r;
    }
    case 7: {
      CriterionResult r;
      apply_checks(r, sweep_for(disk, true),
                   {"lambda_tilde decreasing", "gap below 10% of lambda0", "lambda_tilde >= lambda0 - margin"});
      return r;
    }
    case 8: {
      CriterionResult r;
      apply_checks(r, sweep_for(disk, true),
                   {"psi_tilde within 10% of 2 kappa d_max", "psi_tilde upper bound (sigma0 = 0.2)",
                    "psi_tilde lower bound (sigma3 = 0.3)", "routes to h agree"});
      return r;
    }
    case 9: {
      CriterionResult r;
      const auto& run = sweep_for(disk, true);
      apply_checks(r, run, {"fitted rate within 20% of 2 kappa d_max", "ratio approaches [1/2, 2]"});
      if (run.report) {
        r.detail += "; ratios";
        for (double q : run.report->ratio) r.detail += printf_string(" %.4g", q);
        r.detail += "; band [1/2, 2] is a proxy for the unquantified o(1) term";
      }
      return r;
    }
    case 10: {
      CriterionResult r;
      const auto& run = sweep_for(disk, true);
      apply_checks(r, run, {"blow-up L2 gap nonincreasing", "blow-up L2 gap below 0.1"});
      if (!run.records.empty() && run.records.back().ok())
        r.detail += printf_string("; discretization floor %.3e", run.records.back().blowup_l2_floor);
      return r;
    }
    case 11: {
      CriterionResult r;
      apply_checks(r, sweep_for(disk, true), {"phi norm max <= 2 x median"});
      return r;
    }
    case 12:
      return special_function_integrity();
    default:
      throw ConfigError(printf_string("unknown acceptance criterion %d", id));
  }
}

CriterionResult AcceptanceSuite::run(int id) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = evaluate(id);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  for (const auto& info : criteria())
    if (info.id == id) r.name = info.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> AcceptanceSuite::run_all(const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& info : criteria()) {
    out.push_back(run(info.id));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace bbeig
