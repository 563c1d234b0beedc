#pragma once

#include <vector>

#include "lsc/dense_matrix.hpp"

namespace lsc {

struct SolverConfig {
  int max_iters = 2000;
  double abs_tol = 1e-7;
  double rel_tol = 1e-5;
  double admm_rho = 1.0;
  double over_relaxation = 1.5;
};

void validate(const SolverConfig& cfg);

struct SolveOutcome {
  std::vector<double> solution;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// min_q ‖X q − y‖₁ by ADMM on the split r = X q − y. X must be m x p with
// m >= p and full column rank (detected through the Cholesky pivots of X^T X;
// failure raises a degenerate-input error). Running out of iterations flags
// converged = false instead of throwing.
SolveOutcome lad_solve(const DenseMatrix& x, const std::vector<double>& y,
                       const SolverConfig& cfg);

// min_z ‖D z‖₁ + lambda ‖z‖₁ subject to z[col_index] = 1. The constraint is
// eliminated (fix z_i = 1, drop the constant lambda) leaving
// min_w ‖D^{-i} w + d^i‖₁ + lambda ‖w‖₁, solved by two-prox ADMM. lambda = 0
// is accepted (pure residual mode). The returned solution has z[col_index]
// equal to 1 exactly.
SolveOutcome sparse_rep_solve(const DenseMatrix& d, int col_index, double lambda,
                              const SolverConfig& cfg);

// Same, with the caller-provided Gram matrix D^T D (the per-column reduced
// Gram is sliced out of it instead of being recomputed; used by the
// per-column detection loop).
SolveOutcome sparse_rep_solve(const DenseMatrix& d, int col_index, double lambda,
                              const SolverConfig& cfg, const DenseMatrix& gram_d);

// min_z ‖S z‖₁ subject to B z = 0 and v^T z = 1. The feasible set is
// parameterized through the null space of B (right singular vectors), the
// v-constraint is eliminated with a Householder basis of the reduced
// hyperplane, and the remainder is a LAD problem. Guarantees
// ‖B z‖∞ <= 1e-8 and |v^T z − 1| <= 1e-10 on the result; an empty feasible
// set (v orthogonal to null(B)) raises an infeasible error.
SolveOutcome oracle_solve(const DenseMatrix& b, const DenseMatrix& s,
                          const std::vector<double>& v, const SolverConfig& cfg);

struct L0Result {
  std::vector<double> z;  // coefficients over the columns of A^{-i}
  int l0_value = 0;
};

// min_z ‖A^{-i} z − a^i‖₀ by exhaustive enumeration of candidate residual
// zero-patterns (all row subsets of size >= cols(A^{-i})). Zero means
// |entry| <= 1e-9. Ties in the minimum are broken toward the
// lexicographically smallest zero-index pattern. Refuses inputs beyond the
// stated caps.
L0Result l0_bruteforce(const DenseMatrix& a, int col_index, int max_n1 = 14,
                       int max_cols = 6);

// Default Eq.-style penalty weight for an N1-row problem.
double default_lambda(int n1);

}  // namespace lsc
