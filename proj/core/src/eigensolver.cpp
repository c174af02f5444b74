#include "bbeig/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "bbeig/error.hpp"

namespace bbeig {
namespace {

constexpr double kPositivityTolerance = 1e-9;

struct KrylovOutcome {
  double theta = 0.0;
  Vector x;
  int iterations = 0;
  int restarts = 0;
};

// Largest eigenvalue of an operator T that is self-adjoint in the inner
// product <x, y>_B = x^T B y, by Lanczos with full reorthogonalization and
// explicit restarts from the current Ritz vector.
template <class ApplyT, class ApplyB>
KrylovOutcome lanczos_max(ApplyT&& apply_t, ApplyB&& apply_b, Vector x, const EigenOptions& opt) {
  const Eigen::Index n = x.size();
  const int m = std::max(2, std::min<int>(opt.krylov_dimension, static_cast<int>(n)));
  KrylovOutcome out;
  Eigen::MatrixXd q(n, m);
  Eigen::MatrixXd bq(n, m);
  std::vector<double> alpha;
  std::vector<double> beta;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    out.restarts = restart;
    alpha.clear();
    beta.clear();
    Vector bx = apply_b(x);
    const double nx = std::sqrt(std::max(0.0, x.dot(bx)));
    if (!(nx > 0.0)) throw SolverError("Lanczos start vector has zero norm");
    Vector qj = x / nx;
    Vector bqj = bx / nx;
    double theta = 0.0;
    Vector s;
    int used = 0;
    bool done = false;

    for (int j = 0; j < m; ++j) {
      q.col(j) = qj;
      bq.col(j) = bqj;
      used = j + 1;
      Vector v = apply_t(qj);
      alpha.push_back(bqj.dot(v));
      for (int pass = 0; pass < 2; ++pass) {
        const Vector c = bq.leftCols(used).transpose() * v;
        v.noalias() -= q.leftCols(used) * c;
      }
      const Vector bv = apply_b(v);
      const double b = std::sqrt(std::max(0.0, v.dot(bv)));
      ++out.iterations;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), used);
      Eigen::VectorXd sub = used > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), used - 1))
                                     : Eigen::VectorXd(0);
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      theta = tri.eigenvalues()[used - 1];
      s = tri.eigenvectors().col(used - 1);
      const double spread = std::max(std::fabs(tri.eigenvalues()[0]), std::fabs(theta));
      const double bound = b * std::fabs(s[used - 1]);
      const bool breakdown = b <= 1e-14 * spread;
      if (theta > 0.0 && (bound <= opt.ritz_tolerance * theta || breakdown)) {
        done = true;
        break;
      }
      if (breakdown) break;
      qj = v / b;
      bqj = bv / b;
      beta.push_back(b);
    }

    x = q.leftCols(used) * s;
    out.theta = theta;
    if (done) {
      out.x = x;
      return out;
    }
    if (theta <= 0.0 && restart > 2) break;
  }
  if (out.theta > 0.0) throw SolverError("Lanczos iteration did not converge");
  throw SolverError("no positive principal eigenvalue");
}

Vector weight_vector(const WeightField& w) { return Eigen::Map<const Vector>(w.values.data(), w.values.size()); }

void check_weight(const StiffnessOperator& k, const WeightField& w) {
  if (static_cast<Eigen::Index>(w.values.size()) != k.matrix.rows())
    throw SolverError("weight size does not match the stiffness operator");
  if (std::none_of(w.values.begin(), w.values.end(), [](double v) { return v > 0.0; }))
    throw SolverError("no positive principal eigenvalue");
}

SparseMatrix shifted(const SparseMatrix& k, const Vector& m, double sigma) {
  SparseMatrix b = k;
  for (Eigen::Index i = 0; i < b.rows(); ++i) b.coeffRef(i, i) -= sigma * m[i];
  return b;
}

EigenResult finish(const StiffnessOperator& stiffness, const Vector& m, Vector u, double sigma,
                   const KrylovOutcome& krylov) {
  const GridDomain& domain = *stiffness.domain;
  EigenResult r;
  r.iterations = krylov.iterations;
  r.restarts = krylov.restarts;
  r.shift = sigma;

  const Vector ku = stiffness.matrix * u;
  const double num = u.dot(ku);
  const double den = u.dot(m.cwiseProduct(u));
  if (!(den > 0.0)) throw SolverError("no positive principal eigenvalue");
  r.lambda = num / den;
  r.residual = (ku - r.lambda * m.cwiseProduct(u)).norm() / ku.norm();

  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  if (u[imax] < 0.0) u = -u;
  const double umax = u[imax];
  r.positivity_ok = u.minCoeff() >= -kPositivityTolerance * umax;
  if (!r.positivity_ok) throw SolverError("principal eigenfunction not positive (discretization too coarse)");
  u /= std::sqrt(u.squaredNorm() * domain.grid().cell_volume());
  r.u = to_nodes(domain, u);
  return r;
}

}  // namespace

StiffnessOperator assemble(DomainPtr domain) {
  const GridDomain& d = *domain;
  const GridSpec& g = d.grid();
  const int n = d.dof_count();
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * (2 * g.dimension + 1));
  for (int k = 0; k < n; ++k) {
    const int node = d.node_of_dof(k);
    const int i = g.ix(node);
    const int j = g.iy(node);
    t.emplace_back(k, k, 2.0 * g.dimension * inv_h2);
    const int nbs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (int a = 0; a < 2 * g.dimension; ++a) {
      const int nb = g.index(nbs[a][0], nbs[a][1]);
      const int dof = d.dof_of_node(nb);
      if (dof >= 0) t.emplace_back(k, dof, -inv_h2);
    }
  }
  StiffnessOperator op;
  op.domain = std::move(domain);
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.matrix.makeCompressed();
  return op;
}

BallSpec BallSpec::with_measure(int dimension, const Point& center, double eps) {
  return {center, eps, ball_radius(dimension, eps)};
}

double WeightField::favorable_measure(double cell_volume) const {
  return std::accumulate(fractions.begin(), fractions.end(), 0.0) * cell_volume;
}

double WeightField::total_mass(double cell_volume) const {
  return std::accumulate(values.begin(), values.end(), 0.0) * cell_volume;
}

WeightField constant_weight(const GridDomain& domain, double value) {
  WeightField w;
  w.values.assign(domain.dof_count(), value);
  w.fractions.assign(domain.dof_count(), value > 0.0 ? 1.0 : 0.0);
  w.m_bar = value;
  w.m_under = 0.0;
  w.provenance = "constant";
  return w;
}

WeightField rasterize_weight(const GridDomain& domain, const BallSpec& ball, double m_bar, double m_under,
                             int subsamples, RimMode mode) {
  if (!(m_bar > 0.0) || !(m_under > 0.0)) throw SolverError("weight levels must be positive");
  if (subsamples < 1) throw SolverError("subsample count must be positive");
  const GridSpec& g = domain.grid();
  const int dim = g.dimension;
  if (!(ball.radius > 0.0)) throw GeometryError("ball radius must be positive");
  if (domain.distance_at(ball.center) < ball.radius * (1.0 - 1e-12))
    throw GeometryError("ball not contained in the domain");

  WeightField w;
  const int n = domain.dof_count();
  w.values.assign(n, -m_under);
  w.fractions.assign(n, 0.0);
  w.m_bar = m_bar;
  w.m_under = m_under;
  char buf[160];
  std::snprintf(buf, sizeof buf, "ball center=(%.17g,%.17g) eps=%.17g", ball.center[0], ball.center[1], ball.eps);
  w.provenance = buf;

  const double h = g.h;
  const double r2 = ball.radius * ball.radius;
  const int reach = static_cast<int>(std::ceil(ball.radius / h)) + 1;
  const int ci = static_cast<int>(std::lround((ball.center[0] - g.origin[0]) / h));
  const int cj = dim == 2 ? static_cast<int>(std::lround((ball.center[1] - g.origin[1]) / h)) : 0;
  const int jlo = dim == 2 ? std::max(0, cj - reach) : 0;
  const int jhi = dim == 2 ? std::min(g.extents[1] - 1, cj + reach) : 0;
  const int ilo = std::max(0, ci - reach);
  const int ihi = std::min(g.extents[0] - 1, ci + reach);
  const int samples_y = dim == 2 ? subsamples : 1;
  const double total = static_cast<double>(subsamples) * samples_y;

  for (int j = jlo; j <= jhi; ++j) {
    for (int i = ilo; i <= ihi; ++i) {
      const int node = g.index(i, j);
      const int dof = domain.dof_of_node(node);
      if (dof < 0) continue;
      const Point p = g.node(node);
      double f = 0.0;
      if (mode == RimMode::indicator) {
        const double dx = p[0] - ball.center[0];
        const double dy = dim == 2 ? p[1] - ball.center[1] : 0.0;
        f = dx * dx + dy * dy < r2 ? 1.0 : 0.0;
      } else {
        int inside = 0;
        for (int sy = 0; sy < samples_y; ++sy) {
          const double dy = dim == 2 ? p[1] + ((sy + 0.5) / subsamples - 0.5) * h - ball.center[1] : 0.0;
          for (int sx = 0; sx < subsamples; ++sx) {
            const double dx = p[0] + ((sx + 0.5) / subsamples - 0.5) * h - ball.center[0];
            if (dx * dx + dy * dy < r2) ++inside;
          }
        }
        f = inside / total;
      }
      if (f > 0.0) {
        w.fractions[dof] = f;
        w.values[dof] = m_bar * f - m_under * (1.0 - f);
      }
    }
  }
  return w;
}

PencilSolver::PencilSolver(std::shared_ptr<const StiffnessOperator> stiffness, EigenOptions options)
    : stiffness_(std::move(stiffness)), options_(options), k_solver_(options.linear), shifted_solver_(options.linear) {}

EigenResult PencilSolver::solve(const WeightField& weight, std::optional<double> lambda_hint) {
  const StiffnessOperator& k = *stiffness_;
  check_weight(k, weight);
  const Vector m = weight_vector(weight);

  Vector start = m.cwiseMax(0.0);
  start.array() += 1e-3 * start.maxCoeff();

  double sigma = 0.0;
  if (lambda_hint && *lambda_hint > 0.0) sigma = (1.0 - options_.shift_fraction) * *lambda_hint;

  while (sigma > 0.0) {
    const SparseMatrix b = shifted(k.matrix, m, sigma);
    if (!shifted_solver_.analyzed()) shifted_solver_.analyze(b);
    if (!shifted_solver_.direct()) {
      sigma = 0.0;  // conjugate gradients cannot certify definiteness
      break;
    }
    if (shifted_solver_.factorize(b)) {
      auto apply_t = [&](const Vector& x) { return Vector(shifted_solver_.solve(m.cwiseProduct(x))); };
      auto apply_b = [&](const Vector& x) { return Vector(b * x); };
      const KrylovOutcome kr = lanczos_max(apply_t, apply_b, start, options_);
      return finish(k, m, kr.x, sigma, kr);
    }
    // sigma is above the principal eigenvalue; back off.
    sigma -= 0.3 * *lambda_hint;
    if (sigma < 0.2 * *lambda_hint) sigma = 0.0;
  }

  if (!k_factored_) {
    k_solver_.compute(k.matrix);
    k_factored_ = true;
  }
  auto apply_t = [&](const Vector& x) { return Vector(k_solver_.solve(m.cwiseProduct(x))); };
  auto apply_b = [&](const Vector& x) { return Vector(k.matrix * x); };
  const KrylovOutcome kr = lanczos_max(apply_t, apply_b, start, options_);
  return finish(k, m, kr.x, 0.0, kr);
}

EigenResult PencilSolver::polish(const WeightField& weight, const EigenResult& approx, int iterations) {
  const StiffnessOperator& k = *stiffness_;
  check_weight(k, weight);
  const Vector m = weight_vector(weight);
  const double sigma = approx.lambda * (1.0 - 1e-7);
  const SparseMatrix b = shifted(k.matrix, m, sigma);
  SpdSolver solver(options_.linear);
  solver.analyze(b);
  if (!solver.direct() || !solver.factorize(b))
    throw SolverError("inverse iteration shift is not below the principal eigenvalue");
  Vector x = to_unknowns(*k.domain, approx.u);
  for (int it = 0; it < iterations; ++it) {
    x = solver.solve(m.cwiseProduct(x));
    x /= x.norm();
  }
  KrylovOutcome kr;
  kr.iterations = approx.iterations + iterations;
  kr.restarts = approx.restarts;
  return finish(k, m, x, sigma, kr);
}

EigenResult principal_eigenvalue(const StiffnessOperator& stiffness, const WeightField& weight,
                                 const EigenOptions& options) {
  auto shared = std::make_shared<const StiffnessOperator>(stiffness);
  PencilSolver solver(shared, options);
  return solver.solve(weight);
}

int count_eigenvalues_below(const StiffnessOperator& stiffness, const WeightField& weight, double lambda) {
  check_weight(stiffness, weight);
  return negative_pivot_count(shifted(stiffness.matrix, weight_vector(weight), lambda));
}

double inertia_bisection(const StiffnessOperator& stiffness, const WeightField& weight, double lo, double hi,
                         double rel_tol) {
  if (count_eigenvalues_below(stiffness, weight, lo) != 0)
    throw SolverError("inertia bisection: lower end already above the principal eigenvalue");
  if (count_eigenvalues_below(stiffness, weight, hi) < 1)
    throw SolverError("inertia bisection: upper end below the principal eigenvalue");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(stiffness, weight, mid) == 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double rayleigh_quotient(const StiffnessOperator& stiffness, const WeightField& weight, const GridFunction& u) {
  const Vector x = to_unknowns(*stiffness.domain, u);
  const Vector m = weight_vector(weight);
  return x.dot(stiffness.matrix * x) / x.dot(m.cwiseProduct(x));
}

double l2_norm(const GridDomain& domain, const GridFunction& u) {
  double s = 0.0;
  for (int k = 0; k < domain.dof_count(); ++k) {
    const double v = u[domain.node_of_dof(k)];
    s += v * v;
  }
  return std::sqrt(s * domain.grid().cell_volume());
}

Vector to_unknowns(const GridDomain& domain, const GridFunction& f) {
  Vector v(domain.dof_count());
  for (int k = 0; k < domain.dof_count(); ++k) v[k] = f[domain.node_of_dof(k)];
  return v;
}

GridFunction to_nodes(const GridDomain& domain, const Vector& v) {
  GridFunction f(domain.grid().node_count(), 0.0);
  for (int k = 0; k < domain.dof_count(); ++k) f[domain.node_of_dof(k)] = v[k];
  return f;
}

HelmholtzSolver::HelmholtzSolver(DomainPtr domain, double c, const LinearSolverOptions& options)
    : domain_(std::move(domain)), c_(c), solver_(options) {
  if (!(c > 0.0)) throw SolverError("Helmholtz shift must be positive");
  StiffnessOperator k = assemble(domain_);
  SparseMatrix a = k.matrix;
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += c;
  solver_.compute(a);
}

namespace {

template <class F>
void for_each_exterior_neighbour(const GridDomain& d, F&& f) {
  const GridSpec& g = d.grid();
  for (int k = 0; k < d.dof_count(); ++k) {
    const int node = d.node_of_dof(k);
    const int i = g.ix(node);
    const int j = g.iy(node);
    const int nbs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (int a = 0; a < 2 * g.dimension; ++a) {
      const int nb = g.index(nbs[a][0], nbs[a][1]);
      if (!d.interior(nb)) f(k, nb);
    }
  }
}

}  // namespace

GridFunction HelmholtzSolver::solve(const GridFunction& rhs, const Boundary& boundary) const {
  const GridDomain& d = *domain_;
  Vector b = to_unknowns(d, rhs);
  if (boundary) {
    const double inv_h2 = 1.0 / (d.h() * d.h());
    for_each_exterior_neighbour(d, [&](int k, int nb) { b[k] += boundary(d.grid().node(nb)) * inv_h2; });
  }
  return to_nodes(d, solver_.solve(b));
}

GridFunction HelmholtzSolver::solve_homogeneous(const GridFunction& rhs) const { return solve(rhs, nullptr); }

HelmholtzSolver::Scaled HelmholtzSolver::solve_log_boundary(const Boundary& log_boundary) const {
  const GridDomain& d = *domain_;
  std::vector<std::pair<int, double>> entries;
  double top = -std::numeric_limits<double>::infinity();
  for_each_exterior_neighbour(d, [&](int k, int nb) {
    const double lg = log_boundary(d.grid().node(nb));
    entries.emplace_back(k, lg);
    top = std::max(top, lg);
  });
  Vector b = Vector::Zero(d.dof_count());
  const double inv_h2 = 1.0 / (d.h() * d.h());
  for (const auto& [k, lg] : entries) b[k] += std::exp(lg - top) * inv_h2;
  Scaled out;
  out.values = to_nodes(d, solver_.solve(b));
  out.log_scale = top;
  return out;
}

GridFunction solve_helmholtz(DomainPtr domain, double c, const GridFunction& rhs,
                             const HelmholtzSolver::Boundary& boundary, const LinearSolverOptions& options) {
  HelmholtzSolver solver(std::move(domain), c, options);
  return solver.solve(rhs, boundary);
}

WeightField bathtub_rearrangement(const GridDomain& domain, const GridFunction& u, double eps, double m_bar,
                                  double m_under) {
  const int n = domain.dof_count();
  const double cell = domain.grid().cell_volume();
  if (!(eps > 0.0) || eps > n * cell * (1.0 + 1e-12)) throw SolverError("favourable measure must lie in (0, |Omega|]");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ua = u[domain.node_of_dof(a)];
    const double ub = u[domain.node_of_dof(b)];
    return ua * ua > ub * ub;
  });
  double budget = eps / cell;
  if (std::fabs(budget - std::round(budget)) < 1e-9) budget = std::round(budget);
  WeightField w;
  w.values.assign(n, -m_under);
  w.fractions.assign(n, 0.0);
  w.m_bar = m_bar;
  w.m_under = m_under;
  w.provenance = "rearrangement";
  for (int idx : order) {
    if (budget <= 0.0) break;
    const double f = std::min(1.0, budget);
    w.fractions[idx] = f;
    w.values[idx] = m_bar * f - m_under * (1.0 - f);
    budget -= f;
  }
  return w;
}

double weighted_mass(const GridDomain& domain, const WeightField& weight, const GridFunction& u) {
  double s = 0.0;
  for (int k = 0; k < domain.dof_count(); ++k) {
    const double v = u[domain.node_of_dof(k)];
    s += weight.values[k] * v * v;
  }
  return s * domain.grid().cell_volume();
}

}  // namespace bbeig
