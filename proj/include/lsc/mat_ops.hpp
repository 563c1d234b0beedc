#pragma once

#include <string>
#include <vector>

#include "lsc/dense_matrix.hpp"

namespace lsc {

enum class NormKind { l1, fro, spectral, l12 };

NormKind norm_kind_from_string(const std::string& s);

double matrix_norm(const DenseMatrix& a, NormKind kind);

// Soft threshold sign(x)*max(|x|-tau, 0); tau must be non-negative.
double shrink(double x, double tau);
DenseMatrix shrink(const DenseMatrix& a, double tau);

// Singular-value soft threshold U diag(max(sigma-tau,0)) V^T.
DenseMatrix sv_threshold(const DenseMatrix& a, double tau);

// log10(‖U - Uhat Uhat^T U‖_F / ‖U‖_F), clamped below at -16. Both arguments
// must have orthonormal columns (Gram within 1e-6 of the identity).
double subspace_recovery_error(const DenseMatrix& u, const DenseMatrix& u_hat);

// Count of singular values above rel_tol * sigma_max (0 for a zero matrix).
int numerical_rank(const DenseMatrix& a, double rel_tol = 1e-10);

// Left singular vectors with sigma > rel_tol * sigma_max.
DenseMatrix orthonormal_basis(const DenseMatrix& a, double rel_tol = 1e-10);

// Elementwise helpers.
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
void add_scaled_in_place(DenseMatrix& a, double s, const DenseMatrix& b);  // a += s*b
DenseMatrix scaled(const DenseMatrix& a, double s);

double frob_norm(const DenseMatrix& a);
double frob_dist(const DenseMatrix& a, const DenseMatrix& b);

std::vector<double> col_norms(const DenseMatrix& a);

}  // namespace lsc
