#include "lsc/randomized.hpp"

#include <chrono>
#include <cmath>

#include "lsc/errors.hpp"
#include "lsc/linalg.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/parallel.hpp"
#include "lsc/solvers.hpp"
#include "lsc/svd.hpp"

namespace lsc {

namespace {

// Separate deterministic streams for the two sampling stages.
constexpr std::uint64_t kColumnStream = 1;
constexpr std::uint64_t kRowStream = 2;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void validate(const SketchConfig& cfg, const DenseMatrix& d) {
  if (d.empty()) throw InvalidInputError("sketch: empty data matrix");
  if (!(cfg.m1 >= 1 && cfg.m1 <= d.cols()))
    throw InvalidInputError("sketch: m1 must lie in [1, N2]");
  if (!(cfg.m2 >= 1 && cfg.m2 <= d.rows()))
    throw InvalidInputError("sketch: m2 must lie in [1, N1]");
  if (!(cfg.sparse_col_threshold > 0.0 && cfg.sparse_col_threshold < 1.0))
    throw InvalidInputError("sketch: sparse_col_threshold must lie in (0, 1)");
  if (cfg.rank_hint < 0) throw InvalidInputError("sketch: rank_hint must be >= 0");
  validate(cfg.sa);
}

}  // namespace

std::pair<DenseMatrix, std::vector<int>> sample_columns(const DenseMatrix& d, int m1,
                                                        Rng& rng) {
  if (d.empty()) throw InvalidInputError("sample_columns: empty data matrix");
  if (m1 < 1 || m1 > d.cols())
    throw InvalidInputError("sample_columns: m1 must lie in [1, N2]");
  std::vector<int> idx = rng.sample_without_replacement(d.cols(), m1);
  DenseMatrix sub = d.columns(idx);
  return {std::move(sub), std::move(idx)};
}

ColumnSpaceResult learn_column_space(const DenseMatrix& d, const SketchConfig& cfg) {
  validate(cfg, d);
  Rng rng(mix64(cfg.seed, kColumnStream));
  ColumnSpaceResult out;
  auto [d_phi1, idx] = sample_columns(d, cfg.m1, rng);
  out.sampled_columns = std::move(idx);

  if (cfg.m1 < 2) {
    // detect_outliers needs two columns to regress against each other; a
    // single sampled column cannot be screened, treat it as an inlier.
    out.detection.certificates.assign(1, SparsityCertificate{});
    out.detection.certificates[0].column_index = 0;
  } else {
    out.detection = detect_outliers(d_phi1, cfg.sa);
  }

  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(cfg.m1));
  {
    std::size_t k = 0;
    for (int i = 0; i < cfg.m1; ++i) {
      if (k < out.detection.outlier_indices.size() && out.detection.outlier_indices[k] == i) {
        ++k;
      } else {
        keep.push_back(i);
      }
    }
  }
  if (keep.empty())
    throw ResampleNeededError("sketch flagged every sampled column as an outlier", cfg.seed);

  const DenseMatrix m_phi1 = d_phi1.columns(keep);
  out.pcp = pcp_decompose(m_phi1, default_lambda(d.rows()), cfg.sa.solver);

  if (cfg.rank_hint > 0) {
    const ThinSvd dec = svd_thin(out.pcp.low_rank, 1e-14);
    const int r = std::min(cfg.rank_hint, dec.rank());
    if (r < 1 || dec.singular_values[0] == 0.0)
      throw DegenerateResultError("sketched low-rank part vanished");
    DenseMatrix u(d.rows(), r);
    for (int i = 0; i < d.rows(); ++i)
      for (int j = 0; j < r; ++j) u(i, j) = dec.left_basis(i, j);
    out.u_hat = std::move(u);
  } else {
    out.u_hat = orthonormal_basis(out.pcp.low_rank, 1e-6);
    if (out.u_hat.empty())
      throw DegenerateResultError("sketched low-rank part vanished");
  }
  out.r_hat = out.u_hat.cols();
  return out;
}

RepresentationResult learn_representation(const DenseMatrix& d, const DenseMatrix& u_hat,
                                          const SketchConfig& cfg) {
  validate(cfg, d);
  if (u_hat.empty() || u_hat.rows() != d.rows())
    throw InvalidInputError("learn_representation: basis shape mismatch");
  const int r_hat = u_hat.cols();
  if (cfg.m2 < r_hat)
    throw InvalidInputError("learn_representation: m2 must be at least the basis rank");
  {
    const DenseMatrix g = gram(u_hat);
    for (int i = 0; i < r_hat; ++i)
      for (int j = 0; j < r_hat; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        if (std::fabs(g(i, j) - want) > 1e-6)
          throw InvalidInputError("learn_representation: basis is not orthonormal");
      }
  }

  RepresentationResult out;
  Rng rng(mix64(cfg.seed, kRowStream));
  out.sampled_rows = rng.sample_without_replacement(d.rows(), cfg.m2);

  DenseMatrix u_rows(cfg.m2, r_hat);
  DenseMatrix d_rows(cfg.m2, d.cols());
  for (int i = 0; i < cfg.m2; ++i) {
    const int src = out.sampled_rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < r_hat; ++j) u_rows(i, j) = u_hat(src, j);
    for (int j = 0; j < d.cols(); ++j) d_rows(i, j) = d(src, j);
  }

  const int n2 = d.cols();
  out.q_hat = DenseMatrix(r_hat, n2);
  out.h = DenseMatrix(cfg.m2, n2);
  out.col_converged.assign(static_cast<std::size_t>(n2), true);
  parallel_for(n2, cfg.sa.jobs, [&](int i) {
    const std::vector<double> y = d_rows.col_copy(i);
    const SolveOutcome sol = lad_solve(u_rows, y, cfg.sa.solver);
    for (int j = 0; j < r_hat; ++j) out.q_hat(j, i) = sol.solution[static_cast<std::size_t>(j)];
    const std::vector<double> fit = gemv(u_rows, sol.solution);
    for (int j = 0; j < cfg.m2; ++j) out.h(j, i) = y[static_cast<std::size_t>(j)] - fit[static_cast<std::size_t>(j)];
    out.col_converged[static_cast<std::size_t>(i)] = sol.converged;
  });
  return out;
}

RandomizedResult randomized_decompose(const DenseMatrix& d, const SketchConfig& cfg) {
  validate(cfg, d);
  RandomizedResult res;

  auto t0 = std::chrono::steady_clock::now();
  ColumnSpaceResult cs = learn_column_space(d, cfg);
  res.diagnostics.cs_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  RepresentationResult rep = learn_representation(d, cs.u_hat, cfg);
  res.diagnostics.representation_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  SaConfig sketch_rule = cfg.sa;
  sketch_rule.outlier_fraction_threshold = cfg.sparse_col_threshold;
  const int n2 = d.cols();
  for (int i = 0; i < n2; ++i) {
    const SparsityCertificate cert =
        sparsity_certificate(rep.h.col_copy(i), i, sketch_rule);
    if (cert.is_outlier) res.outlier_indices.push_back(i);
  }
  res.diagnostics.detection_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  res.low_rank = matmul(cs.u_hat, rep.q_hat);
  res.sparse = DenseMatrix(d.rows(), n2);
  {
    std::size_t k = 0;
    for (int j = 0; j < n2; ++j) {
      const bool outlier =
          k < res.outlier_indices.size() && res.outlier_indices[k] == j;
      if (outlier) {
        ++k;
        for (int i = 0; i < d.rows(); ++i) res.low_rank(i, j) = 0.0;
      } else {
        for (int i = 0; i < d.rows(); ++i)
          res.sparse(i, j) = d(i, j) - res.low_rank(i, j);
      }
    }
  }
  res.basis_u_hat = std::move(cs.u_hat);
  res.q_hat = std::move(rep.q_hat);
  res.diagnostics.assembly_seconds = seconds_since(t0);
  res.diagnostics.r_hat = res.basis_u_hat.cols();
  res.diagnostics.sampled_columns = std::move(cs.sampled_columns);
  res.diagnostics.sampled_rows = std::move(rep.sampled_rows);
  return res;
}

}  // namespace lsc
