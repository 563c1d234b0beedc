#include "lsc/pcp.hpp"

#include <algorithm>
#include <cmath>

#include "lsc/errors.hpp"
#include "lsc/kernels.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/svd.hpp"

namespace lsc {

double pcp_auto_lambda(const DenseMatrix& m) {
  if (m.empty()) throw InvalidInputError("pcp_auto_lambda: empty matrix");
  return 1.0 / std::sqrt(static_cast<double>(std::max(m.rows(), m.cols())));
}

double pcp_auto_gamma(const DenseMatrix& m) {
  if (m.empty()) throw InvalidInputError("pcp_auto_gamma: empty matrix");
  if (m.cols() < 2) throw InvalidInputError("pcp_auto_gamma: need at least two columns");
  return 3.0 / (std::sqrt(static_cast<double>(m.rows())) *
                std::log(static_cast<double>(m.cols())));
}

namespace {

// L <- U (sigma - tau)_+ V^T of the working buffer; the SVD object keeps the
// accumulated right rotations between calls.
void sv_threshold_into(JacobiSvd& svd, const DenseMatrix& work, double tau,
                       bool warm, DenseMatrix& l) {
  const JacobiSvd::Result& dec = svd.compute(work, warm);
  l.fill(0.0);
  const int m = work.rows();
  const int n = work.cols();
  const auto& k = kern::active();
  std::vector<double> vcol(n);
  for (std::size_t c = 0; c < dec.sigma.size(); ++c) {
    const double sv = dec.sigma[c] - tau;
    if (sv <= 0.0) break;  // sigma sorted non-increasing
    for (int j = 0; j < n; ++j) vcol[j] = dec.v(j, static_cast<int>(c));
    // rank-1 update L += sv * u_c v_c^T
    for (int i = 0; i < m; ++i) {
      const double w = sv * dec.u(i, static_cast<int>(c));
      if (w != 0.0) k.axpy(w, vcol.data(), l.row_ptr(i), n);
    }
  }
}

// column-wise group shrinkage: c <- c * max(1 - tau/‖c‖₂, 0)
void col_shrink_into(const DenseMatrix& work, double tau, DenseMatrix& c) {
  const int m = work.rows();
  const int n = work.cols();
  for (int j = 0; j < n; ++j) {
    double sq = 0.0;
    for (int i = 0; i < m; ++i) sq += work(i, j) * work(i, j);
    const double nrm = std::sqrt(sq);
    const double f = nrm > tau ? 1.0 - tau / nrm : 0.0;
    for (int i = 0; i < m; ++i) c(i, j) = f * work(i, j);
  }
}

PcpResult pcp_core(const DenseMatrix& d, double lambda, double gamma,
                   bool with_column, const SolverConfig& cfg) {
  validate(cfg);
  if (d.empty()) throw InvalidInputError("pcp: empty input matrix");
  if (!d.all_finite()) throw InvalidInputError("pcp: input has a non-finite entry");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("pcp: lambda must be positive");
  if (with_column && (!(gamma > 0.0) || !std::isfinite(gamma)))
    throw InvalidInputError("pcp: gamma must be positive");

  const int m = d.rows();
  const int n = d.cols();
  const auto& k = kern::active();

  PcpResult res;
  res.low_rank = DenseMatrix(m, n);
  res.sparse = DenseMatrix(m, n);
  res.column_part = DenseMatrix(m, n);

  const double d_l1 = matrix_norm(d, NormKind::l1);
  const double d_fro = frob_norm(d);
  if (d_l1 == 0.0) {
    res.converged = true;
    return res;
  }

  double mu = static_cast<double>(m) * static_cast<double>(n) / (4.0 * d_l1);
  const double stop_tol = cfg.abs_tol;

  DenseMatrix y(m, n);     // multiplier, unscaled
  DenseMatrix work(m, n);  // prox inputs / residual scratch
  DenseMatrix s_prev(m, n), c_prev(m, n);
  JacobiSvd svd;

  const std::size_t sz = d.size();
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    // L-update
    for (std::size_t t = 0; t < sz; ++t)
      work.data()[t] = d.data()[t] - res.sparse.data()[t] - res.column_part.data()[t] +
                       y.data()[t] / mu;
    sv_threshold_into(svd, work, 1.0 / mu, iter > 1, res.low_rank);

    // S-update
    s_prev = res.sparse;
    for (std::size_t t = 0; t < sz; ++t)
      work.data()[t] = d.data()[t] - res.low_rank.data()[t] - res.column_part.data()[t] +
                       y.data()[t] / mu;
    k.shrink(work.data(), lambda / mu, res.sparse.data(), sz);

    // C-update
    if (with_column) {
      c_prev = res.column_part;
      for (std::size_t t = 0; t < sz; ++t)
        work.data()[t] = d.data()[t] - res.low_rank.data()[t] - res.sparse.data()[t] +
                         y.data()[t] / mu;
      col_shrink_into(work, gamma / mu, res.column_part);
    }

    // multiplier + residuals
    for (std::size_t t = 0; t < sz; ++t)
      work.data()[t] = d.data()[t] - res.low_rank.data()[t] - res.sparse.data()[t] -
                       res.column_part.data()[t];
    const double pri = std::sqrt(k.sqsum(work.data(), sz));
    for (std::size_t t = 0; t < sz; ++t) y.data()[t] += mu * work.data()[t];

    double dual_sq = 0.0;
    for (std::size_t t = 0; t < sz; ++t) {
      const double ds = res.sparse.data()[t] - s_prev.data()[t];
      dual_sq += ds * ds;
      if (with_column) {
        const double dc = res.column_part.data()[t] - c_prev.data()[t];
        dual_sq += dc * dc;
      }
    }
    const double dual = mu * std::sqrt(dual_sq);

    res.constraint_residual = pri / d_fro;
    if (res.constraint_residual < stop_tol) {
      res.converged = true;
      break;
    }
    if (pri > 10.0 * dual) {
      mu *= 2.0;
    } else if (dual > 10.0 * pri) {
      mu /= 2.0;
    }
  }
  res.iterations = std::min(iter, cfg.max_iters);
  return res;
}

}  // namespace

PcpResult pcp_decompose(const DenseMatrix& m, double lambda, const SolverConfig& cfg) {
  return pcp_core(m, lambda, 0.0, false, cfg);
}

PcpResult pcp_outlier_decompose(const DenseMatrix& d, double lambda, double gamma,
                                const SolverConfig& cfg) {
  return pcp_core(d, lambda, gamma, true, cfg);
}

}  // namespace lsc
