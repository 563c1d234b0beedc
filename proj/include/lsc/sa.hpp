#pragma once

#include <vector>

#include "lsc/dense_matrix.hpp"
#include "lsc/pcp.hpp"
#include "lsc/solvers.hpp"

namespace lsc {

struct SparsityCertificate {
  int column_index = -1;
  std::vector<double> normalized_residual;  // h = |r| / max|r|, all zero for r = 0
  int dominant_count = 0;                   // entries of h above the magnitude threshold
  double dominant_fraction = 0.0;           // dominant_count / length(h)
  bool is_outlier = false;
  bool solver_converged = true;  // filled by detect_outliers
};

struct SaConfig {
  // lambda < 0 means "use 1/sqrt(N1) of the matrix at hand"; lambda = 0 is the
  // pure residual mode (no penalty on the coefficients).
  double lambda = -1.0;
  double mag_threshold = 0.1;
  double outlier_fraction_threshold = 0.4;
  SolverConfig solver;
  int jobs = 0;  // parallel width for the per-column solves; <= 0 picks the hardware width
};

void validate(const SaConfig& cfg);

struct DetectionReport {
  std::vector<SparsityCertificate> certificates;  // ordered by column index
  std::vector<int> outlier_indices;               // sorted ascending
};

struct Decomposition {
  DenseMatrix low_rank;
  DenseMatrix sparse;
  std::vector<int> outlier_indices;
  DetectionReport detection;
  PcpResult pcp;  // the run on the outlier-free submatrix (re-embedded above)
};

// Classify one residual vector: normalize by its max magnitude and count the
// entries above cfg.mag_threshold; a column is an outlier when their fraction
// exceeds cfg.outlier_fraction_threshold. A zero residual yields an all-zero
// certificate.
SparsityCertificate sparsity_certificate(const std::vector<double>& residual,
                                         int col_index, const SaConfig& cfg);

// For every column i, solve the self-expression program
// min ‖D z‖₁ + lambda ‖z‖₁ s.t. z_i = 1 and classify the residual D z. The
// per-column solves run as a parallel map; certificates come back ordered by
// column index. A residual whose peak sits at the solver's noise floor
// (relative to the column norm) counts as identically zero.
DetectionReport detect_outliers(const DenseMatrix& d, const SaConfig& cfg);

struct LambdaCalibration {
  double lambda = 0.0;
  double margin = 0.0;  // min outlier dominant_fraction - max inlier one
};

// Grid search for the penalty weight on an instance whose outlier columns are
// known: tries {0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100, 200, 400} times
// 1/sqrt(N1) and keeps the value separating the dominant fractions of the two
// classes by the widest margin. Calibrate on a held-out draw of the regime,
// then detect on the data of interest. When N2 - 1 >= N1 every column is
// exactly representable and the penalty alone carries the separation; the
// useful weight then sits far above 1/sqrt(N1), in the band where an outlying
// column is no longer worth representing (its residual reverts to the raw
// column) while an inlier's subspace representation stays cheap.
LambdaCalibration calibrate_lambda(const DenseMatrix& d,
                                   const std::vector<int>& outlier_cols,
                                   const SaConfig& cfg = {});

// Full pipeline: detect outliers, drop the flagged columns, run pcp_decompose
// on the remainder with lambda = 1/sqrt(N1), and re-embed the parts into full
// frames with zero columns at the flagged positions. Every column flagged =>
// degenerate-result error.
Decomposition sa_decompose(const DenseMatrix& d, const SaConfig& cfg);

}  // namespace lsc
