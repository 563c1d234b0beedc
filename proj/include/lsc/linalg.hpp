#pragma once

#include <vector>

#include "lsc/dense_matrix.hpp"

namespace lsc {

// y = A x
std::vector<double> gemv(const DenseMatrix& a, const std::vector<double>& x);
// y = A^T x
std::vector<double> gemv_t(const DenseMatrix& a, const std::vector<double>& x);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);     // A B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);  // A^T B
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);  // A B^T
DenseMatrix gram(const DenseMatrix& a);                             // A^T A

// Cholesky factorization of a symmetric positive-definite matrix. A pivot
// falling below rel_pivot_tol times the largest diagonal entry is treated as
// rank deficiency (degenerate-input error).
class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& spd, double rel_pivot_tol = 1e-12);

  void solve_in_place(std::vector<double>& b) const;
  std::vector<double> solve(std::vector<double> b) const {
    solve_in_place(b);
    return b;
  }
  int dim() const { return l_.rows(); }

 private:
  DenseMatrix l_;   // lower factor, row-major
  DenseMatrix lt_;  // its transpose, kept for a contiguous back substitution
};

// Orthonormal basis of the hyperplane orthogonal to v, as an n x (n-1)
// matrix (columns 1..n-1 of the Householder reflection mapping e1 to ±v/‖v‖).
DenseMatrix householder_complement(const std::vector<double>& v);

}  // namespace lsc
