#pragma once

#include <vector>

#include "lsc/dense_matrix.hpp"

namespace lsc {

// Thin SVD truncated at the numerical rank.
struct ThinSvd {
  DenseMatrix left_basis;               // rows x k, orthonormal columns
  std::vector<double> singular_values;  // length k, non-increasing
  DenseMatrix right_basis;              // cols x k, orthonormal columns

  int rank() const { return static_cast<int>(singular_values.size()); }
};

// One-sided (Hestenes) Jacobi SVD. compute() returns all K = min(m, n)
// triplets, sigma sorted non-increasing; columns whose singular value is
// exactly zero get a zero basis column on the long side.
//
// The object keeps the accumulated right rotations, so a follow-up
// factorization of a nearby matrix can be warm-started from the previous V.
// The ALM decompositions call this once per iteration; warm starts cut the
// sweep count from ~8 to ~2 after the first few iterations.
class JacobiSvd {
 public:
  struct Result {
    DenseMatrix u;                // m x K
    std::vector<double> sigma;    // length K, non-increasing
    DenseMatrix v;                // n x K
    int sweeps = 0;
  };

  const Result& compute(const DenseMatrix& a, bool warm_start = false);
  const Result& result() const { return result_; }
  void reset() { have_v_ = false; }

 private:
  Result result_;
  std::vector<double> w_;      // oriented working copy, column-major m_ x n_
  std::vector<double> w0_;     // staging buffer for warm starts
  std::vector<double> v_;      // accumulated rotations, column-major n_ x n_
  std::vector<double> colsq_;  // cached squared column norms of w_
  int m_ = 0, n_ = 0;          // oriented dims, m_ >= n_
  bool transposed_ = false;
  bool have_v_ = false;
};

// All singular triplets with sigma > rank_tol * sigma_max. A numerically zero
// matrix yields the canonical k = 1, sigma = {0}, e1/e1 bases so the result
// type stays well-formed.
ThinSvd svd_thin(const DenseMatrix& a, double rank_tol = 1e-10);

// Orthonormal basis of the null space of a tall matrix (rows >= cols), from
// the right singular vectors with sigma <= rel_tol * sigma_max. Returns an
// empty matrix when the null space is trivial.
DenseMatrix nullspace_basis(const DenseMatrix& a, double rel_tol = 1e-10);

}  // namespace lsc
