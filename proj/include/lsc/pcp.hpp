#pragma once

#include "lsc/dense_matrix.hpp"
#include "lsc/solvers.hpp"

namespace lsc {

struct PcpResult {
  DenseMatrix low_rank;
  DenseMatrix sparse;
  DenseMatrix column_part;  // zero matrix for plain PCP
  int iterations = 0;
  bool converged = false;
  double constraint_residual = 0.0;  // ‖D − Σ parts‖_F / ‖D‖_F
};

// min ‖L‖_* + lambda ‖S‖₁  s.t.  L + S = M, by an inexact augmented
// Lagrangian: alternate singular-value thresholding (L) and soft
// thresholding (S) against the multiplier, with residual-balanced penalty
// adaptation. Stops when the relative constraint residual drops below
// cfg.abs_tol (1e-7 by default) or max_iters runs out (flagged, not thrown).
PcpResult pcp_decompose(const DenseMatrix& m, double lambda, const SolverConfig& cfg);

// min ‖L‖_* + lambda ‖S‖₁ + gamma ‖C‖_{1,2}  s.t.  L + S + C = D; adds a
// column-wise group shrinkage block to the same iteration.
PcpResult pcp_outlier_decompose(const DenseMatrix& d, double lambda, double gamma,
                                const SolverConfig& cfg);

// The usual choice when no penalty is given: 1/sqrt(max dimension).
double pcp_auto_lambda(const DenseMatrix& m);

// Default column penalty for the combined program: 3/(sqrt(N1)·log(N2)).
double pcp_auto_gamma(const DenseMatrix& m);

}  // namespace lsc
