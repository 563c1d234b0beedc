#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace oracle {
namespace {

lsc::DenseMatrix gram_naive(const lsc::DenseMatrix& a) {
  const int m = a.rows(), n = a.cols();
  lsc::DenseMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += a(k, i) * a(k, j);
      g(i, j) = acc;
      g(j, i) = acc;
    }
  return g;
}

std::vector<double> matvec_naive(const lsc::DenseMatrix& a, const std::vector<double>& x) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += a(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

double l1_of_residual(const lsc::DenseMatrix& x, const std::vector<double>& y,
                      const std::vector<double>& q) {
  const std::vector<double> r = matvec_naive(x, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += std::fabs(r[i] - y[i]);
  return acc;
}

// Gaussian elimination with partial pivoting; false when (numerically)
// singular.
bool solve_square(lsc::DenseMatrix a, std::vector<double> b, std::vector<double>& out) {
  const int n = a.rows();
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
  if (scale == 0.0) return false;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (std::fabs(a(piv, k)) <= 1e-11 * scale) return false;
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
    }
  }
  out.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) acc -= a(i, j) * out[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / a(i, i);
  }
  return true;
}

}  // namespace

SymEig sym_eig(const lsc::DenseMatrix& a, int max_sweeps) {
  if (a.rows() != a.cols()) throw std::runtime_error("sym_eig: square matrix required");
  const int n = a.rows();
  lsc::DenseMatrix w = a;
  lsc::DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(w(i, j)));
  if (scale == 0.0) scale = 1.0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (std::sqrt(off) <= 1e-15 * scale * n) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(w(p, q)) <= 1e-300) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double wip = w(i, p), wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
        for (int j = 0; j < n; ++j) {
          const double wpj = w(p, j), wqj = w(q, j);
          w(p, j) = c * wpj - s * wqj;
          w(q, j) = s * wpj + c * wqj;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return w(i, i) > w(j, j); });
  SymEig out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = lsc::DenseMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[static_cast<std::size_t>(k)] = w(order[static_cast<std::size_t>(k)],
                                                order[static_cast<std::size_t>(k)]);
    for (int i = 0; i < n; ++i)
      out.vectors(i, k) = v(i, order[static_cast<std::size_t>(k)]);
  }
  return out;
}

std::vector<double> singular_values(const lsc::DenseMatrix& a) {
  const SymEig eig = sym_eig(gram_naive(a));
  std::vector<double> sv(eig.values.size());
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::sqrt(std::max(0.0, eig.values[i]));
  return sv;
}

double nuclear_norm(const lsc::DenseMatrix& a) {
  const std::vector<double> sv = singular_values(a);
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

LadVertex lad_vertex(const lsc::DenseMatrix& x, const std::vector<double>& y) {
  const int m = x.rows(), p = x.cols();
  if (static_cast<int>(y.size()) != m) throw std::runtime_error("lad_vertex: size mismatch");
  if (p < 1 || m < p) throw std::runtime_error("lad_vertex: need rows >= cols >= 1");
  if (m > 30) throw std::runtime_error("lad_vertex: too many rows");
  double combos = 1.0;
  for (int i = 0; i < p; ++i) combos *= static_cast<double>(m - i) / (i + 1);
  if (combos > 5e5) throw std::runtime_error("lad_vertex: too many subsystems");

  LadVertex best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  lsc::DenseMatrix sub(p, p);
  std::vector<double> rhs(static_cast<std::size_t>(p)), q;
  for (;;) {
    for (int i = 0; i < p; ++i) {
      const int row = idx[static_cast<std::size_t>(i)];
      for (int j = 0; j < p; ++j) sub(i, j) = x(row, j);
      rhs[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(row)];
    }
    if (solve_square(sub, rhs, q)) {
      const double obj = l1_of_residual(x, y, q);
      if (obj < best.objective) {
        best.objective = obj;
        best.q = q;
      }
    }
    // next combination
    int i = p - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - p + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (!std::isfinite(best.objective))
    throw std::runtime_error("lad_vertex: design has no invertible subsystem");
  return best;
}

double lad_stationarity_gap(const lsc::DenseMatrix& x, const std::vector<double>& y,
                            const std::vector<double>& q, double zero_tol) {
  const int m = x.rows(), p = x.cols();
  const std::vector<double> r = matvec_naive(x, q);
  std::vector<double> c(static_cast<std::size_t>(p), 0.0);
  std::vector<int> zero_rows;
  for (int i = 0; i < m; ++i) {
    const double ri = r[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
    if (std::fabs(ri) <= zero_tol) {
      zero_rows.push_back(i);
    } else {
      const double s = ri > 0.0 ? 1.0 : -1.0;
      for (int j = 0; j < p; ++j) c[static_cast<std::size_t>(j)] += s * x(i, j);
    }
  }
  // min over g in [-1,1]^Z of ‖c + Σ g_i x_i‖₂ — coordinate descent on a box
  // QP reaches the global optimum.
  const int nz = static_cast<int>(zero_rows.size());
  std::vector<double> g(static_cast<std::size_t>(nz), 0.0);
  std::vector<double> cur = c;
  for (int pass = 0; pass < 2000; ++pass) {
    double moved = 0.0;
    for (int k = 0; k < nz; ++k) {
      const int row = zero_rows[static_cast<std::size_t>(k)];
      double xx = 0.0, xc = 0.0;
      for (int j = 0; j < p; ++j) {
        const double xij = x(row, j);
        xx += xij * xij;
        xc += xij * (cur[static_cast<std::size_t>(j)] -
                     g[static_cast<std::size_t>(k)] * xij);
      }
      if (xx == 0.0) continue;
      const double gk = std::clamp(-xc / xx, -1.0, 1.0);
      const double delta = gk - g[static_cast<std::size_t>(k)];
      if (delta != 0.0) {
        for (int j = 0; j < p; ++j) cur[static_cast<std::size_t>(j)] += delta * x(row, j);
        g[static_cast<std::size_t>(k)] = gk;
        moved = std::max(moved, std::fabs(delta));
      }
    }
    if (moved < 1e-15) break;
  }
  double acc = 0.0;
  for (int j = 0; j < p; ++j) acc += cur[static_cast<std::size_t>(j)] * cur[static_cast<std::size_t>(j)];
  return std::sqrt(acc);
}

NullspaceL1 nullspace_l1(const lsc::DenseMatrix& b, const lsc::DenseMatrix& s,
                         const std::vector<double>& v) {
  const int n = b.cols();
  if (s.cols() != n || static_cast<int>(v.size()) != n)
    throw std::runtime_error("nullspace_l1: size mismatch");

  // Null space of B from the Gram eigendecomposition.
  const SymEig eig = sym_eig(gram_naive(b));
  const double lam_max = eig.values.empty() ? 0.0 : std::max(0.0, eig.values[0]);
  // eigenvalue cut ~ (1e-6 sigma_max)^2: rank-deficient Grams carry O(eps)
  // noise in their null eigenvalues
  const double cut = lam_max * 1e-12;
  std::vector<int> null_cols;
  for (int j = 0; j < n; ++j)
    if (eig.values[static_cast<std::size_t>(j)] <= cut) null_cols.push_back(j);
  const int d = static_cast<int>(null_cols.size());
  if (d == 0) throw std::runtime_error("nullspace_l1: B has a trivial null space");
  lsc::DenseMatrix nb(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) nb(i, j) = eig.vectors(i, null_cols[static_cast<std::size_t>(j)]);

  std::vector<double> w(static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(j)] += nb(i, j) * v[static_cast<std::size_t>(i)];
  double wn2 = 0.0, vn2 = 0.0;
  for (double x : w) wn2 += x * x;
  for (double x : v) vn2 += x * x;
  if (wn2 <= 1e-24 * std::max(1.0, vn2))
    throw std::runtime_error("nullspace_l1: constraints infeasible");

  std::vector<double> u0(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) u0[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] / wn2;

  NullspaceL1 out;
  if (d == 1) {
    out.z.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) out.z[static_cast<std::size_t>(i)] = nb(i, 0) * u0[0];
    out.objective = 0.0;
    const std::vector<double> sz = matvec_naive(s, out.z);
    for (double x : sz) out.objective += std::fabs(x);
    return out;
  }

  // Orthonormal basis of w-perp by Gram-Schmidt over the standard basis.
  std::vector<std::vector<double>> basis;
  std::vector<double> w_hat(w);
  const double wn = std::sqrt(wn2);
  for (double& x : w_hat) x /= wn;
  basis.push_back(w_hat);
  for (int e = 0; e < d && static_cast<int>(basis.size()) < d; ++e) {
    std::vector<double> cand(static_cast<std::size_t>(d), 0.0);
    cand[static_cast<std::size_t>(e)] = 1.0;
    for (const auto& q : basis) {
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += q[static_cast<std::size_t>(i)] * cand[static_cast<std::size_t>(i)];
      for (int i = 0; i < d; ++i) cand[static_cast<std::size_t>(i)] -= dot * q[static_cast<std::size_t>(i)];
    }
    double nn = 0.0;
    for (double x : cand) nn += x * x;
    if (nn > 1e-12) {
      nn = std::sqrt(nn);
      for (double& x : cand) x /= nn;
      basis.push_back(cand);
    }
  }
  if (static_cast<int>(basis.size()) != d)
    throw std::runtime_error("nullspace_l1: basis completion failed");

  // z(t) = N (u0 + W2 t); the reduced problem is plain LAD.
  lsc::DenseMatrix sn(s.rows(), d);
  {
    for (int i = 0; i < s.rows(); ++i)
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += s(i, k) * nb(k, j);
        sn(i, j) = acc;
      }
  }
  lsc::DenseMatrix x(s.rows(), d - 1);
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 1; j < d; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += sn(i, k) * basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      x(i, j - 1) = acc;
    }
  std::vector<double> y(static_cast<std::size_t>(s.rows()), 0.0);
  for (int i = 0; i < s.rows(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < d; ++k) acc += sn(i, k) * u0[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = -acc;
  }
  const LadVertex best = lad_vertex(x, y);

  std::vector<double> u(u0);
  for (int j = 1; j < d; ++j)
    for (int i = 0; i < d; ++i)
      u[static_cast<std::size_t>(i)] += basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                                        best.q[static_cast<std::size_t>(j - 1)];
  out.z.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += nb(i, j) * u[static_cast<std::size_t>(j)];
    out.z[static_cast<std::size_t>(i)] = acc;
  }
  out.objective = best.objective;
  return out;
}

double sphere_min(const std::function<double(const std::vector<double>&)>& fn, int dim,
                  int samples, std::uint64_t seed) {
  if (dim < 1 || samples < 1) throw std::runtime_error("sphere_min: bad arguments");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(dim));
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < samples; ++t) {
    double nn = 0.0;
    do {
      nn = 0.0;
      for (double& x : u) {
        x = dist(gen);
        nn += x * x;
      }
    } while (nn < 1e-12);
    nn = std::sqrt(nn);
    for (double& x : u) x /= nn;
    best = std::min(best, fn(u));
  }
  return best;
}

}  // namespace oracle
