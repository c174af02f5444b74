#include "bbeig/asymptotics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "bbeig/error.hpp"

namespace bbeig {
namespace {

double norm(const Point& p, int dim) { return dim == 2 ? std::hypot(p[0], p[1]) : std::abs(p[0]); }

// Largest |node - center| over the interior nodes, in blow-up units.
double blowup_extent(const GridDomain& d, const Point& center, double k) {
  double r = 0.0;
  for (int dof = 0; dof < d.dof_count(); ++dof) {
    const Point p = d.grid().node(d.node_of_dof(dof));
    r = std::max(r, norm({p[0] - center[0], p[1] - center[1]}, d.dimension()));
  }
  return r / k;
}

// Node function of a domain, looked up at points of the same lattice.
class LatticeLookup {
 public:
  LatticeLookup(const GridDomain& d, const GridFunction& f) : d_(d), f_(f) {}
  double operator()(const Point& p) const {
    const GridSpec& g = d_.grid();
    const long i = std::lround((p[0] - g.origin[0]) / g.h);
    const long j = g.dimension == 2 ? std::lround((p[1] - g.origin[1]) / g.h) : 0;
    if (i < 0 || j < 0 || i >= g.extents[0] || j >= g.extents[1]) return 0.0;
    return f_[g.index(static_cast<int>(i), static_cast<int>(j))];
  }

 private:
  const GridDomain& d_;
  const GridFunction& f_;
};

}  // namespace

double interpolate(const GridDomain& domain, const GridFunction& f, const Point& p) {
  const GridSpec& g = domain.grid();
  const double sx = (p[0] - g.origin[0]) / g.h;
  const double fx = std::floor(sx);
  const int i0 = static_cast<int>(fx);
  const double tx = sx - fx;
  auto at = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= g.extents[0] || j >= g.extents[1]) return 0.0;
    return f[g.index(i, j)];
  };
  if (g.dimension == 1) return (1.0 - tx) * at(i0, 0) + tx * at(i0 + 1, 0);
  const double sy = (p[1] - g.origin[1]) / g.h;
  const double fy = std::floor(sy);
  const int j0 = static_cast<int>(fy);
  const double ty = sy - fy;
  return (1.0 - tx) * (1.0 - ty) * at(i0, j0) + tx * (1.0 - ty) * at(i0 + 1, j0) +
         (1.0 - tx) * ty * at(i0, j0 + 1) + tx * ty * at(i0 + 1, j0 + 1);
}

BlowUpSample blow_up_eigenfunction(const GridDomain& original, const GridFunction& u, const Point& center,
                                   double k, const GridDomain& blowup) {
  const GridSpec& g = original.grid();
  const int dim = original.dimension();
  const double scale = std::pow(k, 0.5 * dim);
  const double tol = 1e-9 * g.h;
  BlowUpSample out;
  out.values.assign(blowup.grid().node_count(), 0.0);
  for (int dof = 0; dof < blowup.dof_count(); ++dof) {
    const int node = blowup.node_of_dof(dof);
    const Point y = blowup.grid().node(node);
    const Point x{center[0] + k * y[0], dim == 2 ? center[1] + k * y[1] : 0.0};
    bool outside = false;
    for (int a = 0; a < dim; ++a) {
      const double lo = g.origin[a] - tol;
      const double hi = g.origin[a] + (g.extents[a] - 1) * g.h + tol;
      if (x[a] < lo || x[a] > hi) outside = true;
    }
    if (outside) {
      ++out.clipped;
      continue;
    }
    out.values[node] = scale * interpolate(original, u, x);
  }
  if (out.clipped > 0)
    std::fprintf(stderr, "warning: %d blow-up nodes lie outside the eigenfunction grid; set to zero\n", out.clipped);
  return out;
}

double full_blowup_window(const GridDomain& domain, const Point& center, double k) {
  const Box b = domain.shape().bounding_box();
  double w = 0.0;
  for (int a = 0; a < domain.dimension(); ++a)
    w = std::max({w, std::abs(b.lo[a] - center[a]), std::abs(b.hi[a] - center[a])});
  return w / k + 2.0 * domain.h() / k;
}

PsiTilde compute_psi_tilde(const GridDomain& domain, const Point& center, double k, const LimitSolution& sol,
                           const BlowUpOptions& options) {
  BlowUpOptions opts = options;
  opts.lattice_aligned = false;
  const DomainPtr bd = blow_up_domain(domain, center, k, full_blowup_window(domain, center, k), opts);
  const int origin = bd->nearest_node({0.0, 0.0});
  if (!bd->interior(origin)) throw GeometryError("blow-up origin is not an interior node");

  LinearSolverOptions lin;
  lin.memory_budget_bytes = opts.memory_budget_bytes;
  const HelmholtzSolver hs(bd, sol.lambda0 * sol.params.m_under, lin);
  const int dim = domain.dimension();
  const auto scaled = hs.solve_log_boundary([&](const Point& y) { return eval_log_w(norm(y, dim), sol); });
  const double v0 = scaled.values[origin];
  if (!(v0 > 0.0)) throw SolverError("h(0) is not positive; the maximum principle failed");
  PsiTilde out;
  out.log_h0 = std::log(v0) + scaled.log_scale;
  out.value = -k * out.log_h0;
  return out;
}

DiscreteLimit discrete_limit_reference(const WeightParams& params, double h, const Point& anchor, double radius,
                                       int subsamples, const EigenOptions& options) {
  const int dim = params.dimension;
  if (dim != 1 && dim != 2) throw ConfigError("discrete limit problem needs dimension 1 or 2");
  const Shape ball = dim == 2 ? Shape(Disk{{0.0, 0.0}, radius}) : Shape::interval(-radius, radius);
  DiscreteLimit out;
  out.domain = build_domain(ball, make_grid(ball, h, anchor));
  const double rho = params.transition_radius();
  out.weight =
      rasterize_weight(*out.domain, {{0.0, 0.0}, unit_ball_volume(dim) * std::pow(rho, dim), rho},
                       params.m_bar, params.m_under, subsamples);
  auto k = std::make_shared<const StiffnessOperator>(assemble(out.domain));
  PencilSolver solver(k, options);
  const EigenResult r = solver.polish(out.weight, solver.solve(out.weight));
  out.lambda = r.lambda;
  out.w = r.u;
  return out;
}

ProjectionResidual projection_residual(const GridDomain& domain, const GridFunction& u, const GridFunction& pw,
                                       double scale) {
  const GridSpec& g = domain.grid();
  const int dim = g.dimension;
  ProjectionResidual out;
  out.phi.assign(g.node_count(), 0.0);
  for (int dof = 0; dof < domain.dof_count(); ++dof) {
    const int node = domain.node_of_dof(dof);
    out.phi[node] = scale * (u[node] - pw[node]);
  }
  const double h = g.h;
  double l2 = 0.0, grad = 0.0, lap = 0.0;
  for (int dof = 0; dof < domain.dof_count(); ++dof) {
    const int node = domain.node_of_dof(dof);
    const int i = g.ix(node);
    const int j = g.iy(node);
    const double c = out.phi[node];
    l2 += c * c;
    double sum = 0.0;
    for (int a = 0; a < dim; ++a) {
      const int lo = a == 0 ? g.index(i - 1, j) : g.index(i, j - 1);
      const int hi = a == 0 ? g.index(i + 1, j) : g.index(i, j + 1);
      const double d = (out.phi[hi] - out.phi[lo]) / (2.0 * h);
      grad += d * d;
      sum += out.phi[hi] + out.phi[lo];
    }
    const double l = (sum - 2.0 * dim * c) / (h * h);
    lap += l * l;
  }
  const double cell = g.cell_volume();
  out.h1_norm = std::sqrt((l2 + grad) * cell);
  out.laplacian_norm = std::sqrt(lap * cell);
  return out;
}

AsymptoticRecord analyze_eps(const Shape& shape, const LimitSolution& sol, double eps,
                             const SweepSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  AsymptoticRecord rec;
  rec.eps = eps;
  try {
    const int dim = shape.dimension();
    if (dim != sol.params.dimension) throw ConfigError("limit problem dimension differs from the domain's");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    rec.k = std::pow(eps, 1.0 / dim);
    rec.beta = 1.0 / rec.k;
    const double r = ball_radius(dim, eps);
    rec.h = settings.fixed_h > 0.0 ? settings.fixed_h : r / settings.cells_per_radius;
    const DomainPtr domain = build_domain(shape, make_grid(shape, rec.h));

    PlacementSettings ps = settings.placement;
    ps.eigen.linear.memory_budget_bytes = settings.memory_budget_bytes;
    const double m_bar = sol.params.m_bar;
    const double m_under = sol.params.m_under;
    PlacementProblem problem(domain, eps, m_bar, m_under, ps);
    const PlacementResult placed = optimize_center(problem);
    const Point x = placed.center;
    rec.center = x;
    rec.lambda = placed.lambda;
    rec.lambda_tilde = rec.k * rec.k * rec.lambda;
    rec.lambda1 = rec.lambda_tilde - sol.lambda0;
    rec.dist = domain->distance_at(x);
    rec.dist_over_k = rec.dist / rec.k;
    rec.evaluations = placed.evaluations;
    if (!settings.blowup_analysis) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return rec;
    }

    const double k = rec.k;
    const double ht = rec.h / k;
    BlowUpOptions bo;
    bo.h = ht;
    bo.lattice_aligned = true;
    bo.memory_budget_bytes = settings.memory_budget_bytes;
    const DomainPtr omega = blow_up_domain(*domain, x, k, full_blowup_window(*domain, x, k), bo);

    // Eigenvector accurate well below exp(-beta psi), which phi divides by.
    const WeightField weight = problem.weight(x);
    PencilSolver polisher(std::make_shared<const StiffnessOperator>(assemble(domain)), ps.eigen);
    const EigenResult eig = polisher.polish(weight, placed.eigen);
    const GridFunction ut = blow_up_eigenfunction(*domain, eig.u, x, k, *omega).values;
    rec.blowup_l2_norm = l2_norm(*omega, ut);

    const double kappa = sol.decay_rate();
    const double ref_radius = blowup_extent(*domain, x, k) + 2.0 * ht + settings.reference_margin / kappa;
    const DiscreteLimit ref =
        discrete_limit_reference(sol.params, ht, omega->grid().origin, ref_radius, ps.subsamples, ps.eigen);
    rec.lambda0_h = ref.lambda;
    rec.gap = rec.lambda_tilde - ref.lambda;
    rec.discretization_margin = std::abs(ref.lambda - sol.lambda0);
    const LatticeLookup wh(*ref.domain, ref.w);

    const GridSpec& og = omega->grid();
    double gap_c = 0.0, gap_h = 0.0, floor_sq = 0.0;
    for (int dof = 0; dof < omega->dof_count(); ++dof) {
      const int node = omega->node_of_dof(dof);
      const Point y = og.node(node);
      const double ry = norm(y, dim);
      if (ry >= settings.l2_gap_radius) continue;
      const double wc = eval_w(ry, sol);
      const double wd = wh(y);
      gap_c += (ut[node] - wc) * (ut[node] - wc);
      gap_h += (ut[node] - wd) * (ut[node] - wd);
      floor_sq += (wd - wc) * (wd - wc);
    }
    rec.blowup_l2_gap = std::sqrt(gap_c * og.cell_volume());
    rec.blowup_l2_gap_h = std::sqrt(gap_h * og.cell_volume());
    rec.blowup_l2_floor = std::sqrt(floor_sq * og.cell_volume());

    BlowUpOptions po = bo;
    const PsiTilde psi = compute_psi_tilde(*domain, x, k, sol, po);
    rec.psi_tilde = psi.value;
    rec.correction = sol.phi * std::exp(psi.log_h0);
    rec.predicted = sol.lambda0 + rec.correction;
    rec.ratio = rec.correction > 0.0 ? rec.gap / rec.correction : std::numeric_limits<double>::infinity();

    // Projection of the discrete limit eigenfunction, two routes to h.
    LinearSolverOptions lin;
    lin.memory_budget_bytes = settings.memory_budget_bytes;
    const HelmholtzSolver hs(omega, ref.lambda * m_under, lin);
    const WeightField f0 = rasterize_weight(*omega, {{0.0, 0.0}, 1.0, sol.rho()}, m_bar, m_under, ps.subsamples);
    GridFunction rhs(og.node_count(), 0.0);
    GridFunction w_nodes(og.node_count(), 0.0);
    for (int dof = 0; dof < omega->dof_count(); ++dof) {
      const int node = omega->node_of_dof(dof);
      w_nodes[node] = wh(og.node(node));
      rhs[node] = ref.lambda * (m_bar + m_under) * f0.fractions[dof] * w_nodes[node];
    }
    const GridFunction pw = hs.solve_homogeneous(rhs);
    const GridFunction hd = hs.solve(GridFunction(og.node_count(), 0.0), [&](const Point& y) { return wh(y); });
    double diff = 0.0, wmax = 0.0;
    for (int dof = 0; dof < omega->dof_count(); ++dof) {
      const int node = omega->node_of_dof(dof);
      diff = std::max(diff, std::abs(hd[node] - (w_nodes[node] - pw[node])));
      wmax = std::max(wmax, std::abs(w_nodes[node]));
    }
    rec.route_gap = diff / wmax;

    const Point zero{0.0, 0.0};
    const double h0 = interpolate(*omega, hd, zero);
    if (!(h0 > 0.0)) throw SolverError("discrete h(0) is not positive");
    rec.psi_tilde_h = -k * std::log(h0);
    rec.ratio_h = rec.gap / (sol.phi * h0);
    const double u0 = interpolate(*omega, ut, zero);
    const double w0 = interpolate(*ref.domain, ref.w, zero);
    GridFunction u1(ut.size()), pw1(pw.size());
    for (std::size_t i = 0; i < ut.size(); ++i) {
      u1[i] = ut[i] / u0;
      pw1[i] = pw[i] / w0;
    }
    const ProjectionResidual pr = projection_residual(*omega, u1, pw1, w0 / h0);
    rec.phi_norm = pr.h1_norm;
    rec.phi_laplacian_norm = pr.laplacian_norm;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<AsymptoticRecord> sweep(const Shape& shape, const LimitSolution& sol, const SweepSettings& settings,
                                    const SweepProgress& progress) {
  const auto& eps = settings.eps_list;
  if (eps.empty()) throw ConfigError("eps_list must not be empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("eps_list entries must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("eps_list must be strictly decreasing");
  }

  const int n = static_cast<int>(eps.size());
  const int pool = std::max(1, std::min(settings.workers, n));
  SweepSettings row_settings = settings;
  row_settings.placement.workers = std::max(1, settings.workers / pool);

  std::vector<std::optional<AsymptoticRecord>> rows(n);
  std::mutex lock;
  int next = 0;
  auto report = [&] {
    if (!progress) return;
    std::vector<AsymptoticRecord> done;
    for (const auto& r : rows)
      if (r) done.push_back(*r);
    progress(done);
  };
  auto worker = [&] {
    for (;;) {
      int i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= n) return;
        i = next++;
      }
      AsymptoticRecord r = analyze_eps(shape, sol, eps[i], row_settings);
      std::lock_guard<std::mutex> g(lock);
      rows[i] = std::move(r);
      report();
    }
  };
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  std::vector<AsymptoticRecord> out;
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

ExpansionReport expansion_report(const std::vector<AsymptoticRecord>& records, const LimitSolution& sol,
                                 double d_max) {
  if (records.size() < 4) throw ConfigError("expansion report needs at least 4 rows");
  ExpansionReport rep;
  rep.rate_reference = 2.0 * sol.decay_rate() * d_max;
  std::vector<double> xs, ys, rs;
  for (const auto& r : records) {
    rep.eps.push_back(r.eps);
    const double ratio = r.psi_tilde > 0.0 ? r.gap / (sol.phi * std::exp(-r.beta * r.psi_tilde)) : r.ratio;
    rep.ratio.push_back(ratio);
    const bool use = r.ok() && r.gap > 0.0 && std::isfinite(r.gap);
    rep.used.push_back(use);
    char msg[200];
    if (!r.ok()) {
      std::snprintf(msg, sizeof msg, "eps=%.6g excluded: %s", r.eps, r.error.c_str());
      rep.warnings.emplace_back(msg);
    } else if (!use) {
      std::snprintf(msg, sizeof msg,
                    "eps=%.6g excluded: gap %.3e is not positive (discretization error exceeds the gap); use a finer h",
                    r.eps, r.gap);
      rep.warnings.emplace_back(msg);
    }
    if (!use) continue;
    xs.push_back(r.beta);
    ys.push_back(std::log(r.gap));
    rs.push_back(ratio);
    rep.psi_tilde_last = r.psi_tilde;
  }
  rep.fit.points = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    rep.fit.slope = sxy / sxx;
    rep.fit.intercept = my - rep.fit.slope * mx;
    rep.rate = -rep.fit.slope;
    if (rep.psi_tilde_last > 0.0) rep.rate_vs_psi = rep.rate / rep.psi_tilde_last - 1.0;
    rep.rate_vs_reference = rep.rate / rep.rate_reference - 1.0;
  } else {
    rep.warnings.emplace_back("fewer than two rows with a positive gap; no fit");
  }
  if (!rs.empty()) {
    const double band = std::log(2.0);
    auto outside_band = [&](double r) { return std::max(0.0, std::abs(std::log(r)) - band); };
    bool toward_one = true, toward_band = true;
    for (std::size_t i = 1; i < rs.size(); ++i) {
      if (std::abs(std::log(rs[i])) > std::abs(std::log(rs[i - 1]))) toward_one = false;
      if (outside_band(rs[i]) > outside_band(rs[i - 1])) toward_band = false;
    }
    rep.ratio_trends_to_one = toward_one;
    rep.ratio_approaches_band = toward_band;
    rep.last_ratio_in_band = std::abs(std::log(rs.back())) <= band;
  }
  return rep;
}

std::vector<PropertyCheck> sweep_property_checks(const std::vector<AsymptoticRecord>& records,
                                                 const ExpansionReport& report, const LimitSolution& sol,
                                                 double d_max) {
  std::vector<const AsymptoticRecord*> rows;
  for (const auto& r : records)
    if (r.ok()) rows.push_back(&r);
  std::vector<PropertyCheck> out;
  char buf[256];
  auto add = [&](const std::string& name, bool pass, const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out.push_back({name, pass, buf});
  };
  if (rows.size() != records.size())
    add("all rows succeeded", false, "%zu of %zu rows failed", records.size() - rows.size(), records.size());
  if (rows.empty()) return out;
  const AsymptoticRecord& last = *rows.back();
  const double kappa = sol.decay_rate();
  const bool blowup = last.psi_tilde > 0.0;

  bool dec = true, above = true, dist_up = true, dk_up = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i];
    if (r.lambda_tilde < sol.lambda0 - r.discretization_margin * (1.0 + 1e-9) - 1e-12) above = false;
    if (i == 0) continue;
    const auto& p = *rows[i - 1];
    if (!(r.lambda_tilde < p.lambda_tilde)) dec = false;
    if (r.dist < p.dist - 1e-12) dist_up = false;
    if (!(r.dist_over_k > p.dist_over_k)) dk_up = false;
  }
  add("lambda_tilde decreasing", dec, "last %.12g, lambda0 %.12g", last.lambda_tilde, sol.lambda0);
  add("lambda_tilde >= lambda0 - margin", above, "margin at smallest eps %.3e", last.discretization_margin);
  const double rel = std::abs(last.lambda_tilde - sol.lambda0) / sol.lambda0;
  add("gap below 10% of lambda0", rel < 0.1, "relative gap %.3e", rel);
  add("distance nondecreasing", dist_up, "last d = %.6g", last.dist);
  const double drel = std::abs(last.dist - d_max) / d_max;
  add("distance within 5% of inradius", drel <= 0.05, "d = %.6g, d_max = %.6g", last.dist, d_max);
  add("d/k increasing and above 3", dk_up && last.dist_over_k > 3.0, "last d/k = %.4g", last.dist_over_k);
  if (!blowup) return out;

  const double upper = (2.0 + 0.2) * kappa * last.dist;
  add("psi_tilde upper bound (sigma0 = 0.2)", last.psi_tilde <= upper, "psi %.6g <= %.6g", last.psi_tilde, upper);
  bool lower_ok = true;
  for (std::size_t i = rows.size() >= 2 ? rows.size() - 2 : 0; i < rows.size(); ++i)
    if (!(rows[i]->psi_tilde >= 0.3 * kappa * rows[i]->dist)) lower_ok = false;
  add("psi_tilde lower bound (sigma3 = 0.3)", lower_ok, "two smallest eps, 0.3 kappa d = %.6g",
      0.3 * kappa * last.dist);
  const double psi_rel = last.psi_tilde / (2.0 * kappa * d_max) - 1.0;
  add("psi_tilde within 10% of 2 kappa d_max", std::abs(psi_rel) <= 0.1, "psi %.6g, relative %.3e",
      last.psi_tilde, psi_rel);

  bool gap_down = true, route_ok = true, norm_ok = true;
  double route_max = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    route_max = std::max(route_max, rows[i]->route_gap);
    if (!(rows[i]->route_gap <= 1e-10)) route_ok = false;
    if (!(rows[i]->blowup_l2_norm <= 1.0 + 1e-3)) norm_ok = false;
    if (i > 0 && rows[i]->blowup_l2_gap_h > rows[i - 1]->blowup_l2_gap_h) gap_down = false;
  }
  add("blow-up L2 gap nonincreasing", gap_down, "last %.3e against the discrete limit, %.3e against w",
      last.blowup_l2_gap_h, last.blowup_l2_gap);
  add("blow-up L2 gap below 0.1", last.blowup_l2_gap_h < 0.1 && last.blowup_l2_gap < 0.1,
      "%.3e (discrete limit), %.3e (w)", last.blowup_l2_gap_h, last.blowup_l2_gap);
  add("blow-up L2 norm at most 1 + 1e-3", norm_ok, "last %.9f", last.blowup_l2_norm);
  add("routes to h agree", route_ok, "max relative difference %.3e", route_max);

  std::vector<double> phis;
  for (const auto* r : rows) phis.push_back(r->phi_norm);
  std::vector<double> sorted = phis;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  add("phi norm max <= 2 x median", sorted.back() <= 2.0 * median, "max %.4g, median %.4g", sorted.back(),
      median);

  if (report.fit.points >= 2) {
    add("fitted rate within 20% of 2 kappa d_max", std::abs(report.rate_vs_reference) <= 0.2,
        "rate %.6g, reference %.6g", report.rate, report.rate_reference);
  } else {
    add("fitted rate within 20% of 2 kappa d_max", false, "fewer than two rows with a positive gap%s", "");
  }
  add("ratio approaches [1/2, 2]", report.ratio_approaches_band && report.last_ratio_in_band,
      "last ratio %.4g", report.ratio.empty() ? 0.0 : last.ratio);
  return out;
}

}  // namespace bbeig
