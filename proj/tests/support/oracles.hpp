#pragma once

// Slow-but-sure reference implementations used only by tests. Everything here
// avoids the library's iterative solvers so the two sides can disagree.

#include <cstdint>
#include <functional>
#include <vector>

#include "lsc/dense_matrix.hpp"

namespace oracle {

// Cyclic Jacobi eigensolver for a symmetric matrix; eigenpairs sorted by
// descending eigenvalue, eigenvectors in the columns.
struct SymEig {
  std::vector<double> values;
  lsc::DenseMatrix vectors;
};
SymEig sym_eig(const lsc::DenseMatrix& a, int max_sweeps = 60);

// Singular values through the Gram matrix (descending, all cols).
std::vector<double> singular_values(const lsc::DenseMatrix& a);

double nuclear_norm(const lsc::DenseMatrix& a);

// Exact least-absolute-deviations minimizer of ‖Xq − y‖₁ by enumerating
// every square subsystem (an optimum sits on a vertex). Guarded for small
// problems only.
struct LadVertex {
  std::vector<double> q;
  double objective = 0.0;
};
LadVertex lad_vertex(const lsc::DenseMatrix& x, const std::vector<double>& y);

// Distance of zero from the subdifferential of ‖Xq − y‖₁ at q: residuals
// within zero_tol get a free weight in [-1, 1], the rest contribute their
// sign. Zero (up to rounding) certifies optimality.
double lad_stationarity_gap(const lsc::DenseMatrix& x, const std::vector<double>& y,
                            const std::vector<double>& q, double zero_tol = 1e-7);

// Exact solution of  min ‖S z‖₁  s.t.  B z = 0, vᵀ z = 1  by null-space
// reduction plus vertex enumeration. Throws std::runtime_error when the
// constraints are infeasible.
struct NullspaceL1 {
  std::vector<double> z;
  double objective = 0.0;
};
NullspaceL1 nullspace_l1(const lsc::DenseMatrix& b, const lsc::DenseMatrix& s,
                         const std::vector<double>& v);

// Minimum of fn over the unit sphere in R^dim by seeded random sampling.
double sphere_min(const std::function<double(const std::vector<double>&)>& fn, int dim,
                  int samples, std::uint64_t seed);

}  // namespace oracle
