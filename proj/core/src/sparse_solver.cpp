#include "bbeig/sparse_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cstdio>
#include <string>

#include "bbeig/error.hpp"

namespace bbeig {
namespace {

// Exposes the column counts computed during symbolic analysis.
class CountingLLT : public Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> {
 public:
  double predicted_nonzeros() const { return static_cast<double>(this->m_nonZerosPerCol.sum()) + rows(); }
};

}  // namespace

struct SpdSolver::Impl {
  LinearSolverOptions options;
  CountingLLT llt;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  bool use_direct = true;
  bool is_analyzed = false;
  double factor_bytes = 0.0;
};

SpdSolver::SpdSolver(const LinearSolverOptions& options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

void SpdSolver::analyze(const SparseMatrix& a) {
  Impl& s = *impl_;
  s.use_direct = !s.options.force_iterative;
  if (s.use_direct) {
    s.llt.analyzePattern(a);
    // 12 bytes per stored entry (value + row index), doubled for workspace.
    s.factor_bytes = 24.0 * s.llt.predicted_nonzeros();
    if (s.factor_bytes > s.options.memory_budget_bytes) s.use_direct = false;
  }
  if (!s.use_direct) {
    s.cg.setTolerance(s.options.cg_tolerance);
    s.cg.setMaxIterations(s.options.cg_max_iterations);
  }
  s.is_analyzed = true;
}

bool SpdSolver::factorize(const SparseMatrix& a) {
  Impl& s = *impl_;
  if (!s.is_analyzed) analyze(a);
  if (s.use_direct) {
    s.llt.factorize(a);
    return s.llt.info() == Eigen::Success;
  }
  s.cg.compute(a);
  return s.cg.info() == Eigen::Success;
}

void SpdSolver::compute(const SparseMatrix& a) {
  analyze(a);
  if (!factorize(a)) throw SolverError("matrix is not positive definite");
}

Vector SpdSolver::solve(const Vector& b) const {
  const Impl& s = *impl_;
  if (s.use_direct) return s.llt.solve(b);
  Vector x = s.cg.solve(b);
  if (s.cg.info() != Eigen::Success) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "conjugate gradients did not converge: relative residual %.3e after %ld iterations",
                  s.cg.error(), static_cast<long>(s.cg.iterations()));
    throw SolverError(msg);
  }
  return x;
}

bool SpdSolver::direct() const { return impl_->use_direct; }
bool SpdSolver::analyzed() const { return impl_->is_analyzed; }
double SpdSolver::predicted_factor_bytes() const { return impl_->factor_bytes; }

int negative_pivot_count(const SparseMatrix& a) {
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverError("LDL^T factorization failed during inertia count");
  const Vector d = ldlt.vectorD();
  int count = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] < 0.0) ++count;
  return count;
}

}  // namespace bbeig
