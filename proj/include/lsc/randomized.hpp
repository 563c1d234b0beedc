#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lsc/dense_matrix.hpp"
#include "lsc/rng.hpp"
#include "lsc/sa.hpp"

namespace lsc {

struct SketchConfig {
  int m1 = 0;  // sampled column count
  int m2 = 0;  // sampled row count
  std::uint64_t seed = 0;
  SaConfig sa;
  // Fraction of the m2 sketched-residual entries above sa.mag_threshold that
  // marks a column non-sparse.
  double sparse_col_threshold = 0.4;
  // > 0 forces the column-space rank instead of the numerical-rank estimate.
  int rank_hint = 0;
};

struct ColumnSpaceResult {
  DenseMatrix u_hat;  // N1 x r_hat, orthonormal columns
  std::vector<int> sampled_columns;
  DetectionReport detection;  // on the sampled submatrix
  PcpResult pcp;              // on the sampled submatrix minus flagged columns
  int r_hat = 0;
};

struct RepresentationResult {
  DenseMatrix q_hat;  // r_hat x N2
  DenseMatrix h;      // m2 x N2 sketched residual D_phi2 − Phi2^T U_hat Q_hat
  std::vector<int> sampled_rows;
  std::vector<bool> col_converged;
};

struct RandomizedDiagnostics {
  int r_hat = 0;
  std::vector<int> sampled_columns;
  std::vector<int> sampled_rows;
  double cs_seconds = 0.0;
  double representation_seconds = 0.0;
  double detection_seconds = 0.0;
  double assembly_seconds = 0.0;
};

struct RandomizedResult {
  DenseMatrix basis_u_hat;  // N1 x r_hat, orthonormal
  DenseMatrix q_hat;        // r_hat x N2
  std::vector<int> outlier_indices;
  DenseMatrix low_rank;  // U_hat Q_hat with outlier columns zeroed
  DenseMatrix sparse;    // D − U_hat Q_hat with outlier columns zeroed
  RandomizedDiagnostics diagnostics;
};

// Uniform column sample without replacement; returns the submatrix (columns
// in draw order) and the index map.
std::pair<DenseMatrix, std::vector<int>> sample_columns(const DenseMatrix& d, int m1,
                                                        Rng& rng);

// Sketch m1 columns, detect and drop their outliers, run pcp_decompose on the
// rest, and return the left singular basis of its low-rank part at the 1e-6
// reporting rank (or cfg.rank_hint). Every sampled column flagged => a
// resample-needed error carrying cfg.seed.
ColumnSpaceResult learn_column_space(const DenseMatrix& d, const SketchConfig& cfg);

// Sketch m2 rows and regress every column of the row-sampled data on the
// row-sampled basis (per-column LAD, parallel map). Requires m2 >= r_hat.
RepresentationResult learn_representation(const DenseMatrix& d, const DenseMatrix& u_hat,
                                          const SketchConfig& cfg);

// Full sketched pipeline: column-space learning, representation learning,
// column classification from the sketched residual, and assembly of the full
// decomposition with the flagged columns zeroed.
RandomizedResult randomized_decompose(const DenseMatrix& d, const SketchConfig& cfg);

}  // namespace lsc
