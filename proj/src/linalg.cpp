#include "lsc/linalg.hpp"

#include <cmath>

#include "lsc/kernels.hpp"

namespace lsc {

namespace {

void check_mul(int an, int bm, const char* what) {
  if (an != bm)
    throw InvalidInputError(std::string(what) + ": inner dimensions disagree (" +
                            std::to_string(an) + " vs " + std::to_string(bm) + ")");
}

}  // namespace

std::vector<double> gemv(const DenseMatrix& a, const std::vector<double>& x) {
  check_mul(a.cols(), static_cast<int>(x.size()), "gemv");
  const auto& k = kern::active();
  std::vector<double> y(static_cast<std::size_t>(a.rows()));
  const auto n = static_cast<std::size_t>(a.cols());
  for (int i = 0; i < a.rows(); ++i)
    y[static_cast<std::size_t>(i)] = k.dot(a.row_ptr(i), x.data(), n);
  return y;
}

std::vector<double> gemv_t(const DenseMatrix& a, const std::vector<double>& x) {
  check_mul(a.rows(), static_cast<int>(x.size()), "gemv_t");
  const auto& k = kern::active();
  std::vector<double> y(static_cast<std::size_t>(a.cols()), 0.0);
  const auto n = static_cast<std::size_t>(a.cols());
  for (int i = 0; i < a.rows(); ++i)
    k.axpy(x[static_cast<std::size_t>(i)], a.row_ptr(i), y.data(), n);
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_mul(a.cols(), b.rows(), "matmul");
  const auto& k = kern::active();
  DenseMatrix c(a.rows(), b.cols());
  const auto n = static_cast<std::size_t>(b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    double* ci = c.row_ptr(i);
    const double* ai = a.row_ptr(i);
    for (int l = 0; l < a.cols(); ++l)
      if (ai[l] != 0.0) k.axpy(ai[l], b.row_ptr(l), ci, n);
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_mul(a.rows(), b.rows(), "matmul_tn");
  const auto& k = kern::active();
  DenseMatrix c(a.cols(), b.cols());
  const auto n = static_cast<std::size_t>(b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row_ptr(i);
    const double* bi = b.row_ptr(i);
    for (int l = 0; l < a.cols(); ++l)
      if (ai[l] != 0.0) k.axpy(ai[l], bi, c.row_ptr(l), n);
  }
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  check_mul(a.cols(), b.cols(), "matmul_nt");
  const auto& k = kern::active();
  DenseMatrix c(a.rows(), b.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    double* ci = c.row_ptr(i);
    const double* ai = a.row_ptr(i);
    for (int j = 0; j < b.rows(); ++j) ci[j] = k.dot(ai, b.row_ptr(j), n);
  }
  return c;
}

DenseMatrix gram(const DenseMatrix& a) { return matmul_tn(a, a); }

Cholesky::Cholesky(const DenseMatrix& spd, double rel_pivot_tol) {
  if (spd.rows() != spd.cols())
    throw InvalidInputError("Cholesky: matrix must be square");
  const int n = spd.rows();
  const auto& k = kern::active();
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, spd(i, i));
  if (!(max_diag > 0.0))
    throw DegenerateInputError("Cholesky: non-positive diagonal");
  const double tol = rel_pivot_tol * max_diag;

  l_ = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    const double d =
        spd(j, j) - k.dot(l_.row_ptr(j), l_.row_ptr(j), static_cast<std::size_t>(j));
    if (!(d > tol))
      throw DegenerateInputError("Cholesky: pivot " + std::to_string(j) +
                                 " below tolerance (rank-deficient matrix)");
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (int i = j + 1; i < n; ++i)
      l_(i, j) =
          (spd(i, j) - k.dot(l_.row_ptr(i), l_.row_ptr(j), static_cast<std::size_t>(j))) /
          ljj;
  }
  lt_ = l_.transposed();
}

void Cholesky::solve_in_place(std::vector<double>& b) const {
  const int n = l_.rows();
  if (static_cast<int>(b.size()) != n)
    throw InvalidInputError("Cholesky::solve: size mismatch");
  const auto& k = kern::active();
  // forward: L y = b
  for (int i = 0; i < n; ++i)
    b[static_cast<std::size_t>(i)] =
        (b[static_cast<std::size_t>(i)] -
         k.dot(l_.row_ptr(i), b.data(), static_cast<std::size_t>(i))) /
        l_(i, i);
  // backward: L^T x = y  (rows of lt_ are columns of L)
  for (int i = n - 1; i >= 0; --i)
    b[static_cast<std::size_t>(i)] =
        (b[static_cast<std::size_t>(i)] -
         k.dot(lt_.row_ptr(i) + i + 1, b.data() + i + 1,
               static_cast<std::size_t>(n - 1 - i))) /
        lt_(i, i);
}

DenseMatrix householder_complement(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n < 2)
    throw InvalidInputError("householder_complement: need dimension >= 2");
  const auto& k = kern::active();
  const double norm = std::sqrt(k.sqsum(v.data(), v.size()));
  if (!(norm > 0.0))
    throw InvalidInputError("householder_complement: zero vector");
  std::vector<double> u(v);
  k.scal(1.0 / norm, u.data(), u.size());
  u[0] += u[0] >= 0.0 ? 1.0 : -1.0;
  const double unorm = std::sqrt(k.sqsum(u.data(), u.size()));
  k.scal(1.0 / unorm, u.data(), u.size());
  DenseMatrix out(n, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n - 1; ++j)
      out(i, j) = (i == j + 1 ? 1.0 : 0.0) -
                  2.0 * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j + 1)];
  return out;
}

}  // namespace lsc
