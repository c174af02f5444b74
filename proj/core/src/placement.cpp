#include "bbeig/placement.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bbeig/error.hpp"

namespace bbeig {
namespace {

std::pair<long long, long long> cache_key(const Point& p, double h) {
  // Probes live on a lattice of spacing h / 2^k; quantize well below it.
  const double q = h / 4096.0;
  return {std::llround(p[0] / q), std::llround(p[1] / q)};
}

}  // namespace

bool placement_less(double lambda_a, const Point& a, double lambda_b, const Point& b) {
  if (lambda_a != lambda_b) return lambda_a < lambda_b;
  if (a[0] != b[0]) return a[0] < b[0];
  return a[1] < b[1];
}

PlacementProblem::PlacementProblem(DomainPtr domain, double eps, double m_bar, double m_under,
                                   PlacementSettings settings)
    : domain_(std::move(domain)),
      eps_(eps),
      m_bar_(m_bar),
      m_under_(m_under),
      radius_(ball_radius(domain_->dimension(), eps)),
      settings_(settings) {
  if (settings_.top_k < 1) throw ConfigError("top_k must be at least 1");
  if (settings_.coarse_grid_factor < 1) throw ConfigError("coarse_grid_factor must be at least 1");
  if (settings_.workers < 1) settings_.workers = 1;
  stiffness_ = std::make_shared<const StiffnessOperator>(assemble(domain_));
  solver_ = std::make_unique<PencilSolver>(stiffness_, settings_.eigen);
}

double PlacementProblem::default_stride() const { return std::max(4.0 * domain_->h(), 0.5 * radius_); }

bool PlacementProblem::admissible(const Point& center) const {
  return bbeig::admissible(*domain_, center, eps_);
}

WeightField PlacementProblem::weight(const Point& center) const {
  return rasterize_weight(*domain_, {center, eps_, radius_}, m_bar_, m_under_, settings_.subsamples);
}

double PlacementProblem::lambda(const Point& center) {
  const auto key = cache_key(center, domain_->h());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double value = solver_->solve(weight(center)).lambda;
  ++evaluations_;
  cache_.emplace(key, value);
  return value;
}

EigenResult PlacementProblem::eigenpair(const Point& center) {
  EigenResult r = solver_->solve(weight(center));
  ++evaluations_;
  cache_.emplace(cache_key(center, domain_->h()), r.lambda);
  return r;
}

std::vector<double> PlacementProblem::lambdas(const std::vector<Point>& centers, const DomainPtr& on_domain) {
  const bool fine = on_domain.get() == domain_.get();
  auto stiffness = fine ? stiffness_ : std::make_shared<const StiffnessOperator>(assemble(on_domain));
  std::vector<double> out(centers.size(), 0.0);
  const int workers = std::max(1, std::min<int>(settings_.workers, static_cast<int>(centers.size())));

  auto run = [&](std::size_t begin, std::size_t end) {
    PencilSolver solver(stiffness, settings_.eigen);
    for (std::size_t i = begin; i < end; ++i) {
      const WeightField w =
          rasterize_weight(*on_domain, {centers[i], eps_, radius_}, m_bar_, m_under_, settings_.subsamples);
      out[i] = solver.solve(w).lambda;
    }
  };

  if (workers == 1) {
    if (fine) {
      for (std::size_t i = 0; i < centers.size(); ++i) out[i] = lambda(centers[i]);
      return out;
    }
    run(0, centers.size());
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (centers.size() + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(centers.size(), b + chunk);
      pool.emplace_back([&, t, b, e] {
        try {
          run(b, e);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    if (fine) {
      for (std::size_t i = 0; i < centers.size(); ++i) cache_.emplace(cache_key(centers[i], domain_->h()), out[i]);
    }
  }
  evaluations_ += static_cast<int>(centers.size());
  return out;
}

std::vector<Candidate> coarse_search(PlacementProblem& problem, double stride) {
  const GridDomain& fine = problem.domain();
  const double h = fine.h();
  if (!(stride >= h * (1.0 - 1e-12))) throw ConfigError("coarse stride must be at least h");
  admissible_centers(fine, problem.eps());  // throws when the admissible set is empty
  const Incenter inc = incenter(fine);

  const int factor = problem.settings().coarse_grid_factor;
  DomainPtr eval_domain = problem.domain_ptr();
  if (factor > 1) {
    eval_domain = build_domain(fine.shape(), make_grid(fine.shape(), h * factor, inc.q));
  }
  const GridDomain& ed = *eval_domain;
  const int step = std::max(1, static_cast<int>(std::lround(stride / ed.h())));
  const int anchor = ed.nearest_node(inc.q);
  const int ai = ed.grid().ix(anchor);
  const int aj = ed.grid().iy(anchor);

  std::vector<Point> centers;
  for (int k = 0; k < ed.dof_count(); ++k) {
    const int node = ed.node_of_dof(k);
    const int di = ed.grid().ix(node) - ai;
    const int dj = ed.grid().iy(node) - aj;
    if (((di % step) + step) % step != 0 || ((dj % step) + step) % step != 0) continue;
    const Point p = ed.grid().node(node);
    if (problem.admissible(p) && bbeig::admissible(ed, p, problem.eps())) centers.push_back(p);
  }
  if (centers.empty()) throw GeometryError("epsilon too large for domain");

  const std::vector<double> lam = problem.lambdas(centers, eval_domain);
  std::vector<Candidate> all(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) all[i] = {centers[i], lam[i]};
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return placement_less(a.lambda, a.center, b.lambda, b.center);
  });
  if (static_cast<int>(all.size()) > problem.settings().top_k) all.resize(problem.settings().top_k);
  return all;
}

PlacementResult refine(PlacementProblem& problem, const Point& start, double initial_step) {
  if (!problem.admissible(start)) throw GeometryError("refine start is not an admissible center");
  const double h = problem.domain().h();
  const double first = initial_step > 0.0 ? initial_step : problem.default_stride();
  // Steps are whole cells. A sub-cell shift changes the rasterized rim and
  // moves lambda by far more than the exponentially small landscape does.
  long long cells = std::max(1LL, std::llround(first / h));
  const int dim = problem.domain().dimension();
  const int evals_before = problem.evaluations();

  PlacementResult r;
  Point x = start;
  double lx = problem.lambda(x);
  r.trace.push_back({x, lx, true});
  const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (;;) {
    const double step = cells * h;
    bool moved = false;
    for (int d = 0; d < 2 * dim; ++d) {
      const Point p{x[0] + step * dirs[d][0], x[1] + step * dirs[d][1]};
      if (!problem.admissible(p)) continue;
      const double lp = problem.lambda(p);
      const bool better = lp < lx;
      r.trace.push_back({p, lp, better});
      if (better) {
        x = p;
        lx = lp;
        moved = true;
        ++r.accepted_moves;
        break;
      }
    }
    if (moved) continue;
    if (cells == 1) break;
    cells /= 2;
  }
  r.center = x;
  r.lambda = lx;
  r.evaluations = problem.evaluations() - evals_before;
  return r;
}

PlacementResult optimize_center(PlacementProblem& problem) {
  const double stride = problem.settings().stride > 0.0 ? problem.settings().stride : problem.default_stride();
  const int evals_before = problem.evaluations();
  const std::vector<Candidate> candidates = coarse_search(problem, stride);

  std::vector<Point> starts;
  for (const auto& c : candidates) starts.push_back(c.center);
  const Incenter inc = incenter(problem.domain());
  if (problem.admissible(inc.q) &&
      std::none_of(starts.begin(), starts.end(), [&](const Point& p) { return p == inc.q; }))
    starts.push_back(inc.q);

  PlacementResult best;
  bool have = false;
  for (const Point& s : starts) {
    PlacementResult r = refine(problem, s, stride);
    if (!have || placement_less(r.lambda, r.center, best.lambda, best.center)) {
      best = std::move(r);
      have = true;
    }
  }
  best.candidates = candidates;
  best.eigen = problem.eigenpair(best.center);
  best.lambda = best.eigen.lambda;
  best.evaluations = problem.evaluations() - evals_before;
  return best;
}

}  // namespace bbeig
