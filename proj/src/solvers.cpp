#include "lsc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "lsc/errors.hpp"
#include "lsc/kernels.hpp"
#include "lsc/linalg.hpp"
#include "lsc/svd.hpp"

namespace lsc {

namespace {

constexpr double kBalanceRatio = 10.0;
constexpr double kBalanceScale = 2.0;
// Rebalance rho only periodically: adjusting it every iteration can flip the
// penalty up and down forever on polyhedral problems (the residuals oscillate
// by nature near a degenerate vertex), which defeats the fixed-rho convergence
// guarantee the scheme is supposed to inherit.
constexpr int kBalanceEvery = 50;

double vec_norm2(const std::vector<double>& v) {
  return std::sqrt(kern::active().sqsum(v.data(), v.size()));
}

void check_finite_vec(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInputError(std::string(what) + " has a non-finite entry");
  }
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw InvalidInputError("solver config: max_iters must be >= 1");
  if (!(cfg.abs_tol > 0.0) || !std::isfinite(cfg.abs_tol))
    throw InvalidInputError("solver config: abs_tol must be positive");
  if (!(cfg.rel_tol > 0.0) || !std::isfinite(cfg.rel_tol))
    throw InvalidInputError("solver config: rel_tol must be positive");
  if (!(cfg.admm_rho > 0.0) || !std::isfinite(cfg.admm_rho))
    throw InvalidInputError("solver config: admm_rho must be positive");
  if (!(cfg.over_relaxation >= 1.0 && cfg.over_relaxation <= 1.8))
    throw InvalidInputError("solver config: over_relaxation must lie in [1, 1.8]");
}

double default_lambda(int n1) {
  if (n1 < 1) throw InvalidInputError("default_lambda: n1 must be positive");
  return 1.0 / std::sqrt(static_cast<double>(n1));
}

SolveOutcome lad_solve(const DenseMatrix& x, const std::vector<double>& y,
                       const SolverConfig& cfg) {
  validate(cfg);
  if (x.empty()) throw InvalidInputError("lad_solve: empty design matrix");
  const int m = x.rows();
  const int p = x.cols();
  if (m < p) throw InvalidInputError("lad_solve: need rows >= cols");
  if (static_cast<int>(y.size()) != m) throw InvalidInputError("lad_solve: rhs length mismatch");
  if (!x.all_finite()) throw InvalidInputError("lad_solve: design matrix has a non-finite entry");
  check_finite_vec(y, "lad_solve: rhs");

  // x-update solves (X^T X) q = X^T (y + z − u); the factor never depends on rho.
  Cholesky chol(gram(x));

  const auto& k = kern::active();
  double rho = cfg.admm_rho;
  const double alpha = cfg.over_relaxation;

  std::vector<double> q(p, 0.0), z(m, 0.0), u(m, 0.0);
  std::vector<double> xq(m, 0.0), xq_hat(m), t(m), z_old(m), diff(p);

  SolveOutcome out;
  const double y_norm = vec_norm2(y);
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    for (int j = 0; j < m; ++j) t[j] = y[j] + z[j] - u[j];
    q = chol.solve(gemv_t(x, t));
    xq = gemv(x, q);

    for (int j = 0; j < m; ++j)
      xq_hat[j] = alpha * xq[j] + (1.0 - alpha) * (z[j] + y[j]);

    z_old = z;
    for (int j = 0; j < m; ++j) t[j] = xq_hat[j] - y[j] + u[j];
    k.shrink(t.data(), 1.0 / rho, z.data(), z.size());
    for (int j = 0; j < m; ++j) u[j] += xq_hat[j] - z[j] - y[j];

    for (int j = 0; j < m; ++j) t[j] = xq[j] - z[j] - y[j];
    const double r_norm = vec_norm2(t);
    for (int j = 0; j < m; ++j) t[j] = z[j] - z_old[j];
    diff = gemv_t(x, t);
    const double s_norm = rho * vec_norm2(diff);

    const double eps_pri =
        std::sqrt(static_cast<double>(m)) * cfg.abs_tol +
        cfg.rel_tol * std::max({vec_norm2(xq), vec_norm2(z), y_norm});
    diff = gemv_t(x, u);
    const double eps_dual = std::sqrt(static_cast<double>(p)) * cfg.abs_tol +
                            cfg.rel_tol * rho * vec_norm2(diff);

    out.primal_residual = r_norm;
    out.dual_residual = s_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      out.converged = true;
      break;
    }

    if (iter % kBalanceEvery == 0) {
      if (r_norm > kBalanceRatio * s_norm) {
        rho *= kBalanceScale;
        for (int j = 0; j < m; ++j) u[j] /= kBalanceScale;
      } else if (s_norm > kBalanceRatio * r_norm) {
        rho /= kBalanceScale;
        for (int j = 0; j < m; ++j) u[j] *= kBalanceScale;
      }
    }
  }
  out.iterations = std::min(iter, cfg.max_iters);

  xq = gemv(x, q);
  for (int j = 0; j < m; ++j) t[j] = xq[j] - y[j];
  out.objective = k.asum(t.data(), t.size());
  out.solution = std::move(q);
  return out;
}

namespace {

// Shared core of the two sparse_rep_solve entry points. gram_d, when present,
// is the full n2 x n2 Gram of D and the reduced (drop row/col i, add identity)
// system matrix is sliced from it.
SolveOutcome sparse_rep_core(const DenseMatrix& d, int col_index, double lambda,
                             const SolverConfig& cfg, const DenseMatrix* gram_d) {
  validate(cfg);
  if (d.empty()) throw InvalidInputError("sparse_rep_solve: empty data matrix");
  if (d.cols() < 2) throw InvalidInputError("sparse_rep_solve: need at least two columns");
  if (col_index < 0 || col_index >= d.cols())
    throw InvalidInputError("sparse_rep_solve: column index out of range");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("sparse_rep_solve: lambda must be >= 0");
  if (!d.all_finite()) throw InvalidInputError("sparse_rep_solve: data matrix has a non-finite entry");
  if (gram_d != nullptr && (gram_d->rows() != d.cols() || gram_d->cols() != d.cols()))
    throw InvalidInputError("sparse_rep_solve: gram matrix shape mismatch");

  const int m = d.rows();
  const int n2 = d.cols();
  const int p = n2 - 1;
  const int i = col_index;

  const DenseMatrix a = d.without_column(col_index);
  const std::vector<double> b = d.col_copy(col_index);

  // System matrix A^T A + I; its Cholesky always exists (eigenvalues >= 1).
  DenseMatrix g(p, p);
  if (gram_d != nullptr) {
    for (int r = 0; r < p; ++r) {
      const int sr = r < i ? r : r + 1;
      const double* src = gram_d->row_ptr(sr);
      double* dst = g.row_ptr(r);
      for (int c = 0; c < p; ++c) dst[c] = src[c < i ? c : c + 1];
    }
  } else {
    g = gram(a);
  }
  // The penalty only enters the iteration through the shrink thresholds
  // 1/rho and lambda/rho, so its useful magnitude tracks the data scale.
  // Seed it from the mean squared column norm (the gram diagonal, read
  // before the +I shift); cfg.admm_rho then means the same thing on unit
  // columns and on raw data hundreds of times larger, and the residual
  // balancing only has to fine-tune from a sane start.
  double diag_mean = 0.0;
  for (int r = 0; r < p; ++r) diag_mean += g(r, r);
  diag_mean /= static_cast<double>(p);

  for (int r = 0; r < p; ++r) g(r, r) += 1.0;
  Cholesky chol(g);

  const auto& k = kern::active();
  double rho = cfg.admm_rho * (diag_mean > 0.0 ? diag_mean : 1.0);
  const double alpha = cfg.over_relaxation;

  std::vector<double> w(p, 0.0), r(m, 0.0), s(p, 0.0), u1(m, 0.0), u2(p, 0.0);
  std::vector<double> aw(m, 0.0), aw_hat(m), w_hat(p), r_old(m), s_old(p);
  std::vector<double> tm(m), tp(p), rhs(p), dual(p);

  const double b_norm = vec_norm2(b);

  SolveOutcome out;
  int iter = 0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    for (int j = 0; j < m; ++j) tm[j] = r[j] - b[j] - u1[j];
    rhs = gemv_t(a, tm);
    for (int j = 0; j < p; ++j) rhs[j] += s[j] - u2[j];
    w = chol.solve(std::move(rhs));
    aw = gemv(a, w);

    for (int j = 0; j < m; ++j)
      aw_hat[j] = alpha * aw[j] + (1.0 - alpha) * (r[j] - b[j]);
    for (int j = 0; j < p; ++j) w_hat[j] = alpha * w[j] + (1.0 - alpha) * s[j];

    r_old = r;
    s_old = s;
    for (int j = 0; j < m; ++j) tm[j] = aw_hat[j] + b[j] + u1[j];
    k.shrink(tm.data(), 1.0 / rho, r.data(), r.size());
    for (int j = 0; j < p; ++j) tp[j] = w_hat[j] + u2[j];
    k.shrink(tp.data(), lambda / rho, s.data(), s.size());

    for (int j = 0; j < m; ++j) u1[j] += aw_hat[j] + b[j] - r[j];
    for (int j = 0; j < p; ++j) u2[j] += w_hat[j] - s[j];

    for (int j = 0; j < m; ++j) tm[j] = aw[j] + b[j] - r[j];
    double pri_sq = k.sqsum(tm.data(), tm.size());
    for (int j = 0; j < p; ++j) tp[j] = w[j] - s[j];
    pri_sq += k.sqsum(tp.data(), tp.size());
    const double r_norm = std::sqrt(pri_sq);

    for (int j = 0; j < m; ++j) tm[j] = r[j] - r_old[j];
    dual = gemv_t(a, tm);
    for (int j = 0; j < p; ++j) dual[j] += s[j] - s_old[j];
    const double s_norm = rho * vec_norm2(dual);

    const double split_norm =
        std::sqrt(k.sqsum(aw.data(), aw.size()) + k.sqsum(w.data(), w.size()));
    const double rs_norm =
        std::sqrt(k.sqsum(r.data(), r.size()) + k.sqsum(s.data(), s.size()));
    const double eps_pri = std::sqrt(static_cast<double>(m + p)) * cfg.abs_tol +
                           cfg.rel_tol * std::max({split_norm, rs_norm, b_norm});
    dual = gemv_t(a, u1);
    for (int j = 0; j < p; ++j) dual[j] += u2[j];
    const double eps_dual = std::sqrt(static_cast<double>(p)) * cfg.abs_tol +
                            cfg.rel_tol * rho * vec_norm2(dual);

    out.primal_residual = r_norm;
    out.dual_residual = s_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      out.converged = true;
      break;
    }

    if (iter % kBalanceEvery == 0) {
      if (r_norm > kBalanceRatio * s_norm) {
        rho *= kBalanceScale;
        for (int j = 0; j < m; ++j) u1[j] /= kBalanceScale;
        for (int j = 0; j < p; ++j) u2[j] /= kBalanceScale;
      } else if (s_norm > kBalanceRatio * r_norm) {
        rho /= kBalanceScale;
        for (int j = 0; j < m; ++j) u1[j] *= kBalanceScale;
        for (int j = 0; j < p; ++j) u2[j] *= kBalanceScale;
      }
    }
  }
  out.iterations = std::min(iter, cfg.max_iters);

  aw = gemv(a, w);
  for (int j = 0; j < m; ++j) tm[j] = aw[j] + b[j];
  out.objective = k.asum(tm.data(), tm.size()) + lambda * k.asum(w.data(), w.size());

  std::vector<double> z(n2, 0.0);
  for (int j = 0; j < p; ++j) z[j < i ? j : j + 1] = w[j];
  z[i] = 1.0;
  out.solution = std::move(z);
  return out;
}

}  // namespace

SolveOutcome sparse_rep_solve(const DenseMatrix& d, int col_index, double lambda,
                              const SolverConfig& cfg) {
  return sparse_rep_core(d, col_index, lambda, cfg, nullptr);
}

SolveOutcome sparse_rep_solve(const DenseMatrix& d, int col_index, double lambda,
                              const SolverConfig& cfg, const DenseMatrix& gram_d) {
  return sparse_rep_core(d, col_index, lambda, cfg, &gram_d);
}

SolveOutcome oracle_solve(const DenseMatrix& b, const DenseMatrix& s,
                          const std::vector<double>& v, const SolverConfig& cfg) {
  validate(cfg);
  if (b.empty() || s.empty()) throw InvalidInputError("oracle_solve: empty input matrix");
  if (b.rows() != s.rows() || b.cols() != s.cols())
    throw InvalidInputError("oracle_solve: B and S must share their shape");
  const int n = b.cols();
  if (static_cast<int>(v.size()) != n) throw InvalidInputError("oracle_solve: v length mismatch");
  if (!b.all_finite() || !s.all_finite())
    throw InvalidInputError("oracle_solve: input matrix has a non-finite entry");
  check_finite_vec(v, "oracle_solve: v");
  const double v_norm = vec_norm2(v);
  if (!(v_norm > 0.0)) throw InvalidInputError("oracle_solve: v must be nonzero");

  // Full right singular basis of B; pad with zero rows when B is wide so the
  // Jacobi sweep returns all n right vectors.
  JacobiSvd svd;
  if (b.rows() < n) {
    DenseMatrix padded(n, n);
    for (int r = 0; r < b.rows(); ++r)
      for (int c = 0; c < n; ++c) padded(r, c) = b(r, c);
    svd.compute(padded);
  } else {
    svd.compute(b);
  }
  const JacobiSvd::Result& dec = svd.result();
  const double sigma_max = dec.sigma.empty() ? 0.0 : dec.sigma[0];
  int rank_b = 0;
  for (double sv : dec.sigma)
    if (sv > 1e-10 * sigma_max) ++rank_b;

  const int null_dim = n - rank_b;
  if (null_dim == 0) throw InfeasibleError("oracle_solve: B has a trivial null space");

  // Null-space basis columns (n x null_dim).
  DenseMatrix nb(n, null_dim);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < null_dim; ++c) nb(r, c) = dec.v(r, rank_b + c);

  std::vector<double> v_red = gemv_t(nb, v);
  const double v_red_norm = vec_norm2(v_red);
  if (v_red_norm <= 1e-10 * v_norm)
    throw InfeasibleError("oracle_solve: v is orthogonal to the null space of B");

  std::vector<double> coeff = v_red;
  const double inv_sq = 1.0 / (v_red_norm * v_red_norm);
  for (double& c : coeff) c *= inv_sq;
  std::vector<double> z0 = gemv(nb, coeff);

  SolveOutcome out;
  if (null_dim == 1) {
    // The feasible set is a single point.
    std::vector<double> sz = gemv(s, z0);
    out.objective = kern::active().asum(sz.data(), sz.size());
    out.solution = std::move(z0);
    out.converged = true;
    return out;
  }

  const DenseMatrix w_red = householder_complement(v_red);  // null_dim x (null_dim-1)
  const DenseMatrix w_full = matmul(nb, w_red);             // n x (null_dim-1)
  const DenseMatrix x = matmul(s, w_full);                  // rows(S) x (null_dim-1)
  std::vector<double> y = gemv(s, z0);
  for (double& e : y) e = -e;

  // The reduced design can be column rank deficient (rows of S may vanish);
  // restrict to the dominant right singular directions and keep zero
  // coefficients along the rest (the minimal-norm representative).
  const ThinSvd xs = svd_thin(x);
  std::vector<double> t(x.cols(), 0.0);
  if (!(xs.singular_values.empty() || xs.singular_values[0] == 0.0)) {
    const int kx = xs.rank();
    if (kx == x.cols()) {
      SolveOutcome inner = lad_solve(x, y, cfg);
      t = inner.solution;
      out.iterations = inner.iterations;
      out.converged = inner.converged;
      out.primal_residual = inner.primal_residual;
      out.dual_residual = inner.dual_residual;
    } else {
      DenseMatrix xr(x.rows(), kx);
      for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < kx; ++c)
          xr(r, c) = xs.left_basis(r, c) * xs.singular_values[c];
      SolveOutcome inner = lad_solve(xr, y, cfg);
      for (int r = 0; r < x.cols(); ++r) {
        double acc = 0.0;
        for (int c = 0; c < kx; ++c) acc += xs.right_basis(r, c) * inner.solution[c];
        t[r] = acc;
      }
      out.iterations = inner.iterations;
      out.converged = inner.converged;
      out.primal_residual = inner.primal_residual;
      out.dual_residual = inner.dual_residual;
    }
  } else {
    out.converged = true;  // S annihilates every feasible direction
  }

  std::vector<double> z = z0;
  const std::vector<double> wt = gemv(w_full, t);
  for (int j = 0; j < n; ++j) z[j] += wt[j];

  std::vector<double> sz = gemv(s, z);
  out.objective = kern::active().asum(sz.data(), sz.size());
  out.solution = std::move(z);
  return out;
}

L0Result l0_bruteforce(const DenseMatrix& a, int col_index, int max_n1, int max_cols) {
  if (a.empty()) throw InvalidInputError("l0_bruteforce: empty matrix");
  if (col_index < 0 || col_index >= a.cols())
    throw InvalidInputError("l0_bruteforce: column index out of range");
  if (a.rows() > max_n1 || a.cols() > max_cols)
    throw InvalidInputError("l0_bruteforce: instance exceeds the enumeration caps");
  if (!a.all_finite()) throw InvalidInputError("l0_bruteforce: matrix has a non-finite entry");

  constexpr double kZeroTol = 1e-9;
  const int m = a.rows();
  const std::vector<double> target = a.col_copy(col_index);

  L0Result best;
  if (a.cols() == 1) {
    int nnz = 0;
    for (double e : target)
      if (std::fabs(e) > kZeroTol) ++nnz;
    best.l0_value = nnz;
    return best;
  }

  const DenseMatrix mat = a.without_column(col_index);
  const int p = mat.cols();

  double consistency_scale = 1.0;
  for (double e : target) consistency_scale = std::max(consistency_scale, std::fabs(e));

  int best_zeros = -1;
  std::vector<int> best_pattern;
  std::vector<double> best_z;

  std::vector<int> rows_in;
  rows_in.reserve(m);
  const std::uint32_t full = 1u << m;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    rows_in.clear();
    for (int r = 0; r < m; ++r)
      if (mask & (1u << r)) rows_in.push_back(r);
    if (static_cast<int>(rows_in.size()) < p) continue;

    const int nr = static_cast<int>(rows_in.size());
    DenseMatrix sub(nr, p);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < p; ++c) sub(r, c) = mat(rows_in[r], c);

    // Minimal-norm least squares through the thin SVD, then a consistency
    // check: a subset only yields a candidate when its subsystem is exactly
    // solvable.
    const ThinSvd dec = svd_thin(sub);
    std::vector<double> z(p, 0.0);
    if (!dec.singular_values.empty() && dec.singular_values[0] > 0.0) {
      const int kr = dec.rank();
      for (int c = 0; c < kr; ++c) {
        double acc = 0.0;
        for (int r = 0; r < nr; ++r) acc += dec.left_basis(r, c) * target[rows_in[r]];
        acc /= dec.singular_values[c];
        for (int j = 0; j < p; ++j) z[j] += dec.right_basis(j, c) * acc;
      }
    }

    bool consistent = true;
    for (int r = 0; r < nr && consistent; ++r) {
      double acc = 0.0;
      for (int c = 0; c < p; ++c) acc += sub(r, c) * z[c];
      if (std::fabs(acc - target[rows_in[r]]) > kZeroTol * consistency_scale) consistent = false;
    }
    if (!consistent) continue;

    std::vector<int> pattern;
    pattern.reserve(m);
    for (int r = 0; r < m; ++r) {
      double acc = 0.0;
      for (int c = 0; c < p; ++c) acc += mat(r, c) * z[c];
      if (std::fabs(acc - target[r]) <= kZeroTol) pattern.push_back(r);
    }
    const int zeros = static_cast<int>(pattern.size());
    if (zeros > best_zeros ||
        (zeros == best_zeros &&
         std::lexicographical_compare(pattern.begin(), pattern.end(),
                                      best_pattern.begin(), best_pattern.end()))) {
      best_zeros = zeros;
      best_pattern = std::move(pattern);
      best_z = std::move(z);
    }
  }

  if (best_zeros < 0) {
    // Unreachable in practice: any full-rank size-p subsystem is consistent.
    best.z.assign(p, 0.0);
    int nnz = 0;
    for (double e : target)
      if (std::fabs(e) > kZeroTol) ++nnz;
    best.l0_value = nnz;
    return best;
  }

  best.z = std::move(best_z);
  best.l0_value = m - best_zeros;
  return best;
}

}  // namespace lsc
