#pragma once

#include <Eigen/Sparse>
#include <memory>

namespace bbeig {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;

struct LinearSolverOptions {
  double memory_budget_bytes = 2.0e9;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 50000;
  bool force_iterative = false;
};

// Symmetric positive definite solver: sparse Cholesky (AMD ordering) when the
// predicted factor fits the memory budget, Jacobi-preconditioned conjugate
// gradients otherwise.
class SpdSolver {
 public:
  explicit SpdSolver(const LinearSolverOptions& options = {});
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  // Symbolic analysis; later factorize() calls must share the sparsity pattern.
  void analyze(const SparseMatrix& a);
  // Returns false when the matrix is not positive definite (direct path only).
  bool factorize(const SparseMatrix& a);
  void compute(const SparseMatrix& a);

  Vector solve(const Vector& b) const;

  bool direct() const;
  bool analyzed() const;
  double predicted_factor_bytes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Number of negative pivots in the LDL^T factorization of a, i.e. the number
// of negative eigenvalues by Sylvester's law of inertia.
int negative_pivot_count(const SparseMatrix& a);

}  // namespace bbeig
