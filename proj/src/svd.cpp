#include "lsc/svd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "lsc/kernels.hpp"

namespace lsc {

namespace {
constexpr double kOffTol = 1e-13;
constexpr int kMaxSweeps = 60;
}  // namespace

const JacobiSvd::Result& JacobiSvd::compute(const DenseMatrix& a, bool warm_start) {
  if (a.empty()) throw InvalidInputError("svd: empty matrix");
  if (!a.all_finite()) throw InvalidInputError("svd: non-finite entries");
  const auto& k = kern::active();

  const bool transpose = a.rows() < a.cols();
  const int m = transpose ? a.cols() : a.rows();
  const int n = transpose ? a.rows() : a.cols();
  const auto mz = static_cast<std::size_t>(m);
  const auto nz = static_cast<std::size_t>(n);

  const bool warm = warm_start && have_v_ && m_ == m && n_ == n &&
                    transposed_ == transpose;
  m_ = m;
  n_ = n;
  transposed_ = transpose;

  // Stage the oriented matrix column-major into w0_. When transposing, the
  // row-major source buffer is already the column-major layout of A^T.
  w0_.resize(mz * nz);
  if (transpose) {
    std::memcpy(w0_.data(), a.data(), mz * nz * sizeof(double));
  } else {
    for (int i = 0; i < a.rows(); ++i) {
      const double* row = a.row_ptr(i);
      for (int j = 0; j < a.cols(); ++j) w0_[static_cast<std::size_t>(j) * mz + i] = row[j];
    }
  }

  w_.assign(mz * nz, 0.0);
  if (warm) {
    // w = w0 * V_prev, accumulating scaled source columns.
    for (int j = 0; j < n; ++j) {
      double* wj = w_.data() + static_cast<std::size_t>(j) * mz;
      const double* vj = v_.data() + static_cast<std::size_t>(j) * nz;
      for (int l = 0; l < n; ++l)
        if (vj[l] != 0.0) k.axpy(vj[l], w0_.data() + static_cast<std::size_t>(l) * mz, wj, mz);
    }
  } else {
    w_.swap(w0_);
    v_.assign(nz * nz, 0.0);
    for (int j = 0; j < n; ++j) v_[static_cast<std::size_t>(j) * nz + j] = 1.0;
  }

  colsq_.resize(nz);
  for (int j = 0; j < n; ++j)
    colsq_[static_cast<std::size_t>(j)] = k.sqsum(w_.data() + static_cast<std::size_t>(j) * mz, mz);

  int sweeps = 0;
  for (; sweeps < kMaxSweeps; ++sweeps) {
    if (sweeps > 0 && sweeps % 4 == 0) {
      // refresh cached norms to keep the incremental updates honest
      for (int j = 0; j < n; ++j)
        colsq_[static_cast<std::size_t>(j)] =
            k.sqsum(w_.data() + static_cast<std::size_t>(j) * mz, mz);
    }
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double* wp = w_.data() + static_cast<std::size_t>(p) * mz;
        double* wq = w_.data() + static_cast<std::size_t>(q) * mz;
        // A cached square that cancelled to zero must be remeasured, not
        // skipped: the column can still hold real mass, and skipping its
        // pairs until the periodic refresh lets a sweep declare convergence
        // around it.
        double dpp = colsq_[static_cast<std::size_t>(p)];
        if (dpp <= 0.0) dpp = colsq_[static_cast<std::size_t>(p)] = k.sqsum(wp, mz);
        double dqq = colsq_[static_cast<std::size_t>(q)];
        if (dqq <= 0.0) dqq = colsq_[static_cast<std::size_t>(q)] = k.sqsum(wq, mz);
        if (dpp <= 0.0 || dqq <= 0.0) continue;
        const double dpq = k.dot(wp, wq, mz);
        const double rel = std::fabs(dpq) / std::sqrt(dpp * dqq);
        off = std::max(off, rel);
        if (rel <= kOffTol) continue;
        const double tau = (dqq - dpp) / (2.0 * dpq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        k.rot(wp, wq, c, s, mz);
        k.rot(v_.data() + static_cast<std::size_t>(p) * nz,
              v_.data() + static_cast<std::size_t>(q) * nz, c, s, nz);
        colsq_[static_cast<std::size_t>(p)] = std::max(0.0, dpp - t * dpq);
        colsq_[static_cast<std::size_t>(q)] = std::max(0.0, dqq + t * dpq);
      }
    }
    if (off <= kOffTol) break;
  }
  have_v_ = true;

  // Singular values from fresh column norms, sorted non-increasing.
  std::vector<double> sigma(nz);
  for (int j = 0; j < n; ++j)
    sigma[static_cast<std::size_t>(j)] =
        std::sqrt(k.sqsum(w_.data() + static_cast<std::size_t>(j) * mz, mz));
  std::vector<int> order(nz);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return sigma[static_cast<std::size_t>(x)] > sigma[static_cast<std::size_t>(y)];
  });

  Result& r = result_;
  r.sweeps = sweeps;
  r.sigma.resize(nz);
  DenseMatrix wn(m, n);  // normalized oriented left vectors, row-major
  DenseMatrix vn(n, n);
  for (int jo = 0; jo < n; ++jo) {
    const int j = order[static_cast<std::size_t>(jo)];
    const double sv = sigma[static_cast<std::size_t>(j)];
    r.sigma[static_cast<std::size_t>(jo)] = sv;
    const double* wj = w_.data() + static_cast<std::size_t>(j) * mz;
    const double inv = sv > 0.0 ? 1.0 / sv : 0.0;
    for (int i = 0; i < m; ++i) wn(i, jo) = wj[i] * inv;
    const double* vj = v_.data() + static_cast<std::size_t>(j) * nz;
    for (int i = 0; i < n; ++i) vn(i, jo) = vj[i];
  }
  if (!transpose) {
    r.u = std::move(wn);
    r.v = std::move(vn);
  } else {
    r.u = std::move(vn);
    r.v = std::move(wn);
  }
  return result_;
}

ThinSvd svd_thin(const DenseMatrix& a, double rank_tol) {
  if (!(rank_tol >= 0.0)) throw InvalidInputError("svd_thin: rank_tol must be >= 0");
  JacobiSvd engine;
  const auto& r = engine.compute(a);
  const double smax = r.sigma.empty() ? 0.0 : r.sigma[0];
  ThinSvd out;
  if (smax <= 0.0) {
    // canonical representation of the zero matrix
    out.left_basis = DenseMatrix(a.rows(), 1);
    out.left_basis(0, 0) = 1.0;
    out.right_basis = DenseMatrix(a.cols(), 1);
    out.right_basis(0, 0) = 1.0;
    out.singular_values = {0.0};
    return out;
  }
  int k = 0;
  while (k < static_cast<int>(r.sigma.size()) &&
         r.sigma[static_cast<std::size_t>(k)] > rank_tol * smax)
    ++k;
  std::vector<int> keep(static_cast<std::size_t>(k));
  std::iota(keep.begin(), keep.end(), 0);
  out.left_basis = r.u.columns(keep);
  out.right_basis = r.v.columns(keep);
  out.singular_values.assign(r.sigma.begin(), r.sigma.begin() + k);
  return out;
}

DenseMatrix nullspace_basis(const DenseMatrix& a, double rel_tol) {
  if (a.rows() < a.cols())
    throw InvalidInputError("nullspace_basis: matrix must have rows >= cols");
  JacobiSvd engine;
  const auto& r = engine.compute(a);
  const double smax = r.sigma.empty() ? 0.0 : r.sigma[0];
  std::vector<int> keep;
  for (int j = 0; j < static_cast<int>(r.sigma.size()); ++j)
    if (r.sigma[static_cast<std::size_t>(j)] <= rel_tol * smax) keep.push_back(j);
  if (keep.empty()) return DenseMatrix();
  return r.v.columns(keep);
}

}  // namespace lsc
