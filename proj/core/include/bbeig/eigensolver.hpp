#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbeig/geometry.hpp"
#include "bbeig/sparse_solver.hpp"

namespace bbeig {

// Node-indexed values on a grid; entries off the interior mask are zero
// unless stated otherwise.
using GridFunction = std::vector<double>;

struct StiffnessOperator {
  DomainPtr domain;
  SparseMatrix matrix;  // -Delta_h on interior unknowns, Dirichlet neighbours eliminated
};

StiffnessOperator assemble(DomainPtr domain);

struct BallSpec {
  Point center{0.0, 0.0};
  double eps = 0.0;
  double radius = 0.0;

  static BallSpec with_measure(int dimension, const Point& center, double eps);
};

enum class RimMode { fraction, indicator };

struct WeightField {
  std::vector<double> values;     // per unknown
  std::vector<double> fractions;  // favourable fraction per unknown, in [0, 1]
  double m_bar = 0.0;
  double m_under = 0.0;
  std::string provenance;

  double favorable_measure(double cell_volume) const;
  double total_mass(double cell_volume) const;
};

// Explicit weight from per-unknown values, e.g. m = 1.
WeightField constant_weight(const GridDomain& domain, double value);

// Cells inside the ball get m_bar, cells outside -m_under, rim cells the
// convex combination m_bar f - m_under (1 - f) with f from subsamples^N points.
WeightField rasterize_weight(const GridDomain& domain, const BallSpec& ball, double m_bar, double m_under,
                             int subsamples = 4, RimMode mode = RimMode::fraction);

struct EigenOptions {
  double ritz_tolerance = 1e-12;
  int krylov_dimension = 60;
  int max_restarts = 40;
  // With a hint, the pencil is shifted to sigma = (1 - shift_fraction) * hint.
  double shift_fraction = 0.1;
  LinearSolverOptions linear;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction u;  // per node, L2-normalized, positive at its maximum
  double residual = 0.0;
  bool positivity_ok = false;
  int iterations = 0;
  int restarts = 0;
  double shift = 0.0;
};

// Principal eigenpair of K u = lambda M u for one stiffness matrix and many
// weights. The K factor is computed once; shifted solves reuse the ordering.
// Not safe for concurrent use; give each worker its own instance.
class PencilSolver {
 public:
  explicit PencilSolver(std::shared_ptr<const StiffnessOperator> stiffness, EigenOptions options = {});

  // Without a hint this is Lanczos on K^{-1} M in the K inner product. A hint
  // close to lambda selects the shift-and-invert variant (K - sigma M)^{-1} M
  // in the (K - sigma M) inner product, sigma below the eigenvalue; a failed
  // Cholesky factorization proves sigma too large and the shift is lowered.
  EigenResult solve(const WeightField& weight, std::optional<double> lambda_hint = std::nullopt);

  // Inverse iteration at a shift just below approx.lambda; drives the
  // eigenvector error to roundoff level.
  EigenResult polish(const WeightField& weight, const EigenResult& approx, int iterations = 2);

  const StiffnessOperator& stiffness() const { return *stiffness_; }
  const EigenOptions& options() const { return options_; }

 private:
  std::shared_ptr<const StiffnessOperator> stiffness_;
  EigenOptions options_;
  SpdSolver k_solver_;
  SpdSolver shifted_solver_;
  bool k_factored_ = false;
};

EigenResult principal_eigenvalue(const StiffnessOperator& stiffness, const WeightField& weight,
                                 const EigenOptions& options = {});

// Negative eigenvalue count of K - lambda M.
int count_eigenvalues_below(const StiffnessOperator& stiffness, const WeightField& weight, double lambda);

// Bisection on the inertia count between lo (count 0) and hi (count >= 1).
double inertia_bisection(const StiffnessOperator& stiffness, const WeightField& weight, double lo, double hi,
                         double rel_tol = 1e-10);

// Rayleigh quotient (u^T K u) / (u^T M u) of a node-indexed function.
double rayleigh_quotient(const StiffnessOperator& stiffness, const WeightField& weight, const GridFunction& u);

// Discrete L2 norm over the interior.
double l2_norm(const GridDomain& domain, const GridFunction& u);

// (-Delta_h + c) v = rhs in the interior, v = g on exterior neighbours.
class HelmholtzSolver {
 public:
  HelmholtzSolver(DomainPtr domain, double c, const LinearSolverOptions& options = {});

  using Boundary = std::function<double(const Point&)>;

  GridFunction solve(const GridFunction& rhs, const Boundary& boundary) const;
  GridFunction solve_homogeneous(const GridFunction& rhs) const;

  // Boundary data given through its logarithm. Returns v e^{-log_scale}
  // with log_scale the largest boundary log value, so nothing underflows.
  struct Scaled {
    GridFunction values;
    double log_scale = 0.0;
  };
  Scaled solve_log_boundary(const Boundary& log_boundary) const;

  const GridDomain& domain() const { return *domain_; }
  double shift() const { return c_; }

 private:
  DomainPtr domain_;
  double c_;
  SpdSolver solver_;
};

GridFunction solve_helmholtz(DomainPtr domain, double c, const GridFunction& rhs,
                             const HelmholtzSolver::Boundary& boundary, const LinearSolverOptions& options = {});

// Optimal weight for sum m u^2 h^N with -m_under <= m <= m_bar and favourable
// measure eps: m_bar on the cells with the largest u^2 (ties by index), one
// fractional cell if eps is not a whole number of cells.
WeightField bathtub_rearrangement(const GridDomain& domain, const GridFunction& u, double eps, double m_bar,
                                  double m_under);

double weighted_mass(const GridDomain& domain, const WeightField& weight, const GridFunction& u);

// Conversions between node-indexed grid functions and unknown vectors.
Vector to_unknowns(const GridDomain& domain, const GridFunction& f);
GridFunction to_nodes(const GridDomain& domain, const Vector& v);

}  // namespace bbeig
