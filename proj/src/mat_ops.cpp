#include "lsc/mat_ops.hpp"

#include <cmath>

#include "lsc/kernels.hpp"
#include "lsc/linalg.hpp"
#include "lsc/svd.hpp"

namespace lsc {

namespace {

void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInputError(std::string(what) + ": shape mismatch");
}

void check_orthonormal(const DenseMatrix& u, const char* what) {
  const DenseMatrix g = gram(u);
  double dev = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      dev = std::max(dev, std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)));
  if (dev > 1e-6)
    throw InvalidInputError(std::string(what) +
                            ": columns are not orthonormal (Gram deviation " +
                            std::to_string(dev) + ")");
}

}  // namespace

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "l1") return NormKind::l1;
  if (s == "fro") return NormKind::fro;
  if (s == "spectral") return NormKind::spectral;
  if (s == "l12") return NormKind::l12;
  throw InvalidInputError("unknown norm kind: " + s);
}

double matrix_norm(const DenseMatrix& a, NormKind kind) {
  if (a.empty()) throw InvalidInputError("matrix_norm: empty matrix");
  const auto& k = kern::active();
  switch (kind) {
    case NormKind::l1:
      return k.asum(a.data(), a.size());
    case NormKind::fro:
      return std::sqrt(k.sqsum(a.data(), a.size()));
    case NormKind::spectral:
      return svd_thin(a).singular_values[0];
    case NormKind::l12: {
      double s = 0.0;
      for (const double cn : col_norms(a)) s += cn;
      return s;
    }
  }
  throw InvalidInputError("matrix_norm: bad kind");
}

double shrink(double x, double tau) {
  if (!(tau >= 0.0)) throw InvalidInputError("shrink: tau must be non-negative");
  const double m = std::fabs(x) - tau;
  return m > 0.0 ? std::copysign(m, x) : 0.0;
}

DenseMatrix shrink(const DenseMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw InvalidInputError("shrink: tau must be non-negative");
  if (a.empty()) throw InvalidInputError("shrink: empty matrix");
  DenseMatrix out(a.rows(), a.cols());
  kern::active().shrink(a.data(), tau, out.data(), a.size());
  return out;
}

DenseMatrix sv_threshold(const DenseMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw InvalidInputError("sv_threshold: tau must be non-negative");
  const ThinSvd t = svd_thin(a);
  std::vector<int> keep;
  for (int j = 0; j < t.rank(); ++j)
    if (t.singular_values[static_cast<std::size_t>(j)] > tau) keep.push_back(j);
  if (keep.empty()) return DenseMatrix(a.rows(), a.cols());
  DenseMatrix us = t.left_basis.columns(keep);
  for (int i = 0; i < us.rows(); ++i) {
    double* row = us.row_ptr(i);
    for (std::size_t j = 0; j < keep.size(); ++j)
      row[j] *= t.singular_values[static_cast<std::size_t>(keep[j])] - tau;
  }
  return matmul_nt(us, t.right_basis.columns(keep));
}

double subspace_recovery_error(const DenseMatrix& u, const DenseMatrix& u_hat) {
  if (u.empty() || u_hat.empty())
    throw InvalidInputError("subspace_recovery_error: empty basis");
  if (u.rows() != u_hat.rows())
    throw InvalidInputError("subspace_recovery_error: row count mismatch");
  check_orthonormal(u, "subspace_recovery_error: U");
  check_orthonormal(u_hat, "subspace_recovery_error: U_hat");
  const DenseMatrix proj = matmul(u_hat, matmul_tn(u_hat, u));
  const double ratio = frob_dist(u, proj) / frob_norm(u);
  if (ratio < 1e-16) return -16.0;
  return std::max(std::log10(ratio), -16.0);
}

int numerical_rank(const DenseMatrix& a, double rel_tol) {
  JacobiSvd engine;
  const auto& r = engine.compute(a);
  const double smax = r.sigma.empty() ? 0.0 : r.sigma[0];
  if (smax <= 0.0) return 0;
  int k = 0;
  while (k < static_cast<int>(r.sigma.size()) &&
         r.sigma[static_cast<std::size_t>(k)] > rel_tol * smax)
    ++k;
  return k;
}

DenseMatrix orthonormal_basis(const DenseMatrix& a, double rel_tol) {
  return svd_thin(a, rel_tol).left_basis;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "add");
  DenseMatrix out = a;
  kern::active().axpy(1.0, b.data(), out.data(), out.size());
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "sub");
  DenseMatrix out = a;
  kern::active().axpy(-1.0, b.data(), out.data(), out.size());
  return out;
}

void add_scaled_in_place(DenseMatrix& a, double s, const DenseMatrix& b) {
  check_same_shape(a, b, "add_scaled_in_place");
  kern::active().axpy(s, b.data(), a.data(), a.size());
}

DenseMatrix scaled(const DenseMatrix& a, double s) {
  DenseMatrix out = a;
  kern::active().scal(s, out.data(), out.size());
  return out;
}

double frob_norm(const DenseMatrix& a) {
  return std::sqrt(kern::active().sqsum(a.data(), a.size()));
}

double frob_dist(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "frob_dist");
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    const double* ra = a.row_ptr(i);
    const double* rb = b.row_ptr(i);
    for (int j = 0; j < a.cols(); ++j) {
      const double d = ra[j] - rb[j];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

std::vector<double> col_norms(const DenseMatrix& a) {
  std::vector<double> out(static_cast<std::size_t>(a.cols()), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* row = a.row_ptr(i);
    for (int j = 0; j < a.cols(); ++j) out[static_cast<std::size_t>(j)] += row[j] * row[j];
  }
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

}  // namespace lsc
