#include "lsc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsc/errors.hpp"
#include "lsc/kernels.hpp"
#include "lsc/linalg.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/parallel.hpp"
#include "lsc/rng.hpp"
#include "lsc/solvers.hpp"
#include "lsc/svd.hpp"

namespace lsc {

namespace {

constexpr double kTwoOverPi = 0.63661977236758134308;  // 2/π

double vec_norm2(const std::vector<double>& v) {
  return std::sqrt(kern::active().sqsum(v.data(), v.size()));
}

// Full right singular basis of b, splitting row space and null space at the
// 1e-10 relative rank cut. Pads zero rows when b is wide so all n right
// vectors come back.
struct RowSpaceSplit {
  DenseMatrix r_b;  // n x rank
  DenseMatrix p_b;  // n x (n - rank)
  int rank = 0;
};

RowSpaceSplit split_row_space(const DenseMatrix& b) {
  const int n = b.cols();
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
  RowSpaceSplit out;
  for (double sv : dec.sigma)
    if (sv > 1e-10 * sigma_max) ++out.rank;
  if (out.rank > 0) {
    out.r_b = DenseMatrix(n, out.rank);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < out.rank; ++c) out.r_b(r, c) = dec.v(r, c);
  }
  if (out.rank < n) {
    out.p_b = DenseMatrix(n, n - out.rank);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n - out.rank; ++c) out.p_b(r, c) = dec.v(r, out.rank + c);
  }
  return out;
}

void finish_report(ConditionReport& rep) {
  rep.holds = rep.lhs_first > rep.rhs_first && rep.lhs_second > rep.rhs_second;
  if (!rep.holds) {
    rep.certification = "conditions not satisfied";
  } else if (rep.infimum_method == "sampled") {
    rep.certification = "certified up to sampling";
  } else {
    rep.certification = "certified";
  }
}

// Objectives over the unit sphere of row-space coordinates: given the
// projected rows g_i = R_b^T b_i, f2(u) = Σ_{zero rows} |g_i^T u| and
// f1(u) = f2(u) − 2 Σ_{orthogonal nonzero rows} |g_i^T u|.
struct SphereObjectives {
  const DenseMatrix* g = nullptr;
  const std::vector<int>* zero_rows = nullptr;
  const std::vector<int>* ortho_rows = nullptr;

  double f2(const double* u, int dim) const {
    const auto& k = kern::active();
    double acc = 0.0;
    for (int i : *zero_rows) acc += std::fabs(k.dot(g->row_ptr(i), u, dim));
    return acc;
  }
  double f1(const double* u, int dim) const {
    const auto& k = kern::active();
    double acc = f2(u, dim);
    for (int i : *ortho_rows) acc -= 2.0 * std::fabs(k.dot(g->row_ptr(i), u, dim));
    return acc;
  }
};

template <typename F>
double golden_refine(F&& f, double lo, double hi, double seed_value) {
  const double gr = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return std::min({seed_value, fc, fd});
}

void normalize(std::vector<double>& u) {
  const double n = vec_norm2(u);
  if (n > 0.0)
    for (double& x : u) x /= n;
}

template <typename F>
double coordinate_descent(F&& f, std::vector<double> u, double value) {
  const int dim = static_cast<int>(u.size());
  double h = 0.25;
  int passes = 0;
  std::vector<double> cand;
  while (h > 1e-7 && passes < 500) {
    ++passes;
    bool improved = false;
    for (int j = 0; j < dim; ++j) {
      for (double sgn : {1.0, -1.0}) {
        cand = u;
        cand[j] += sgn * h;
        normalize(cand);
        const double val = f(cand.data());
        if (val < value - 1e-15) {
          value = val;
          u = cand;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return value;
}

}  // namespace

SupportSets support_sets(const DenseMatrix& s, const std::vector<double>& z,
                         double zero_tol) {
  if (s.empty()) throw InvalidInputError("support_sets: empty matrix");
  if (static_cast<int>(z.size()) != s.cols())
    throw InvalidInputError("support_sets: z length mismatch");
  if (!(zero_tol >= 0.0)) throw InvalidInputError("support_sets: zero_tol must be >= 0");

  const auto& k = kern::active();
  const int n1 = s.rows();
  const int n = s.cols();
  const double z_norm = vec_norm2(z);

  SupportSets out;
  for (int i = 0; i < n1; ++i) {
    const double* row = s.row_ptr(i);
    const double peak = k.amax(row, static_cast<std::size_t>(n));
    if (peak <= zero_tol) {
      out.zero_row_set.push_back(i);
      out.z_orthogonal_set.push_back(i);
      continue;
    }
    ++out.n_s;
    const double dot = k.dot(row, z.data(), n);
    const double row_norm = std::sqrt(k.sqsum(row, static_cast<std::size_t>(n)));
    if (std::fabs(dot) <= zero_tol * row_norm * z_norm) {
      out.z_orthogonal_set.push_back(i);
      ++out.n_s_prime;
    }
  }
  return out;
}

double xi_bound(int n1, int n_s, int r_b, double t1) {
  if (r_b < 2)
    throw UnsupportedRegimeError("xi_bound: needs a row-space dimension of at least 2");
  if (n1 < 1) throw InvalidInputError("xi_bound: n1 must be positive");
  if (n_s < 0 || n_s > n1) throw InvalidInputError("xi_bound: n_s must lie in [0, n1]");
  if (!(t1 >= 0.0) || !std::isfinite(t1))
    throw InvalidInputError("xi_bound: t1 must be >= 0");
  const double clean = static_cast<double>(n1 - n_s);
  return std::sqrt(kTwoOverPi) * clean / std::sqrt(static_cast<double>(r_b)) -
         2.0 * std::sqrt(clean) -
         t1 * std::sqrt(clean / static_cast<double>(r_b - 1));
}

double permeance_lower_bound(int n, int r, double t) {
  if (r < 2)
    throw UnsupportedRegimeError("permeance_lower_bound: needs r of at least 2");
  if (n < 1) throw InvalidInputError("permeance_lower_bound: n must be positive");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidInputError("permeance_lower_bound: t must be >= 0");
  return xi_bound(n, 0, r, t);
}

double lemma3_tail(int r, double t) {
  if (r < 1) throw InvalidInputError("lemma3_tail: r must be positive");
  if (!(t > 1.0) || !std::isfinite(t))
    throw InvalidInputError("lemma3_tail: t must exceed 1");
  const double t2 = t * t;
  return std::exp(-0.5 * static_cast<double>(r) * (t2 - std::log(t2) - 1.0));
}

std::vector<double> alpha_vector(const DenseMatrix& a, const DenseMatrix& s,
                                 const std::vector<double>& z_star) {
  if (a.empty() || s.empty()) throw InvalidInputError("alpha_vector: empty matrix");
  if (a.rows() != s.rows() || a.cols() != s.cols())
    throw InvalidInputError("alpha_vector: A and S must share their shape");
  if (static_cast<int>(z_star.size()) != a.cols())
    throw InvalidInputError("alpha_vector: z length mismatch");

  const auto& k = kern::active();
  const int n = a.cols();
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double dot = k.dot(s.row_ptr(i), z_star.data(), n);
    if (dot > 0.0) {
      k.axpy(1.0, a.row_ptr(i), alpha.data(), n);
    } else if (dot < 0.0) {
      k.axpy(-1.0, a.row_ptr(i), alpha.data(), n);
    }
  }
  return alpha;
}

ConditionReport theorem2_conditions(const DenseMatrix& b, const DenseMatrix& s,
                                    const std::vector<double>& v,
                                    const std::vector<double>& z_star,
                                    int num_dirs, std::uint64_t seed) {
  if (b.empty() || s.empty()) throw InvalidInputError("theorem2_conditions: empty matrix");
  if (b.rows() != s.rows() || b.cols() != s.cols())
    throw InvalidInputError("theorem2_conditions: B and S must share their shape");
  const int n = b.cols();
  if (static_cast<int>(v.size()) != n || static_cast<int>(z_star.size()) != n)
    throw InvalidInputError("theorem2_conditions: vector length mismatch");
  if (num_dirs < 1) throw InvalidInputError("theorem2_conditions: num_dirs must be >= 1");
  if (!b.all_finite() || !s.all_finite())
    throw InvalidInputError("theorem2_conditions: input has a non-finite entry");

  const auto& k = kern::active();
  const double v_norm = vec_norm2(v);
  if (!(v_norm > 0.0)) throw InvalidInputError("theorem2_conditions: v must be nonzero");

  const RowSpaceSplit split = split_row_space(b);
  if (split.rank == n || split.p_b.empty())
    throw InfeasibleError("theorem2_conditions: B has a trivial null space");
  const double v_null = vec_norm2(gemv_t(split.p_b, v));
  if (v_null <= 1e-10 * v_norm)
    throw InfeasibleError("theorem2_conditions: v is orthogonal to the null space of B");

  // Feasibility of the supplied oracle point.
  {
    const std::vector<double> bz = gemv(b, z_star);
    const double scale = std::max(1.0, frob_norm(b) * vec_norm2(z_star));
    if (k.amax(bz.data(), bz.size()) > 1e-6 * scale)
      throw InvalidInputError("theorem2_conditions: z_star does not satisfy B z = 0");
    const double vz = k.dot(v.data(), z_star.data(), n);
    if (std::fabs(vz - 1.0) > 1e-6)
      throw InvalidInputError("theorem2_conditions: z_star does not satisfy v^T z = 1");
  }

  ConditionReport rep;
  rep.support = support_sets(s, z_star);

  // RHS: Σ_{L_z}‖s_i‖ + ‖α‖ (zero rows contribute nothing to the sum, and α
  // skips rows whose residual entry vanished, per the support tolerance).
  double sum_s = 0.0;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  {
    std::size_t zi = 0;
    for (int i = 0; i < s.rows(); ++i) {
      const bool in_lz = zi < rep.support.z_orthogonal_set.size() &&
                         rep.support.z_orthogonal_set[zi] == i;
      const double* srow = s.row_ptr(i);
      if (in_lz) {
        ++zi;
        sum_s += std::sqrt(k.sqsum(srow, static_cast<std::size_t>(n)));
        continue;
      }
      const double dot = k.dot(srow, z_star.data(), n);
      const double sgn = dot > 0.0 ? 1.0 : -1.0;
      for (int j = 0; j < n; ++j) alpha[static_cast<std::size_t>(j)] += sgn * (b(i, j) + srow[j]);
    }
  }
  rep.alpha_norm = vec_norm2(alpha);
  rep.rhs_first = sum_s + rep.alpha_norm;
  rep.rhs_second = rep.rhs_first;

  // Row partition for the two sphere objectives: zero rows and orthogonal
  // nonzero rows.
  std::vector<int> ortho_nonzero;
  {
    std::size_t zi = 0;
    for (int i : rep.support.z_orthogonal_set) {
      while (zi < rep.support.zero_row_set.size() && rep.support.zero_row_set[zi] < i) ++zi;
      const bool zero = zi < rep.support.zero_row_set.size() &&
                        rep.support.zero_row_set[zi] == i;
      if (!zero) ortho_nonzero.push_back(i);
    }
  }

  const DenseMatrix g = matmul(b, split.r_b);  // rows g_i = R_b^T b_i
  SphereObjectives obj{&g, &rep.support.zero_row_set, &ortho_nonzero};
  const int rb = split.rank;

  double inf_f1 = 0.0, inf_f2 = 0.0;
  if (rb == 1) {
    const double u = 1.0;
    inf_f1 = obj.f1(&u, 1);
    inf_f2 = obj.f2(&u, 1);
    rep.infimum_method = "exact_lowdim";
  } else if (rb == 2) {
    // the objectives are even, so [0, π) covers the circle
    const int grid = std::max(num_dirs, 8);
    const double step = 3.14159265358979323846 / static_cast<double>(grid);
    std::vector<double> vals1(static_cast<std::size_t>(grid)), vals2(vals1.size());
    parallel_for(grid, 0, [&](int i) {
      const double th = step * static_cast<double>(i);
      const double u[2] = {std::cos(th), std::sin(th)};
      vals1[static_cast<std::size_t>(i)] = obj.f1(u, 2);
      vals2[static_cast<std::size_t>(i)] = obj.f2(u, 2);
    });
    const auto arg1 = std::min_element(vals1.begin(), vals1.end()) - vals1.begin();
    const auto arg2 = std::min_element(vals2.begin(), vals2.end()) - vals2.begin();
    auto eval1 = [&](double th) {
      const double u[2] = {std::cos(th), std::sin(th)};
      return obj.f1(u, 2);
    };
    auto eval2 = [&](double th) {
      const double u[2] = {std::cos(th), std::sin(th)};
      return obj.f2(u, 2);
    };
    inf_f1 = golden_refine(eval1, step * (static_cast<double>(arg1) - 1.0),
                           step * (static_cast<double>(arg1) + 1.0),
                           vals1[static_cast<std::size_t>(arg1)]);
    inf_f2 = golden_refine(eval2, step * (static_cast<double>(arg2) - 1.0),
                           step * (static_cast<double>(arg2) + 1.0),
                           vals2[static_cast<std::size_t>(arg2)]);
    rep.infimum_method = "exact_lowdim";
  } else {
    // seeded sphere sample, then coordinate descent from the best starts
    DenseMatrix dirs(num_dirs, rb);
    {
      Rng rng(mix64(seed, 0x7468656f72656d32ULL));
      for (int i = 0; i < num_dirs; ++i) {
        double sq = 0.0;
        do {
          sq = 0.0;
          for (int j = 0; j < rb; ++j) {
            const double x = rng.normal();
            dirs(i, j) = x;
            sq += x * x;
          }
        } while (sq == 0.0);
        const double inv = 1.0 / std::sqrt(sq);
        for (int j = 0; j < rb; ++j) dirs(i, j) *= inv;
      }
    }
    std::vector<double> vals1(static_cast<std::size_t>(num_dirs)), vals2(vals1.size());
    parallel_for(num_dirs, 0, [&](int i) {
      vals1[static_cast<std::size_t>(i)] = obj.f1(dirs.row_ptr(i), rb);
      vals2[static_cast<std::size_t>(i)] = obj.f2(dirs.row_ptr(i), rb);
    });

    auto descend = [&](const std::vector<double>& vals, auto&& f) {
      std::vector<int> order(static_cast<std::size_t>(num_dirs));
      std::iota(order.begin(), order.end(), 0);
      const int starts = std::min(3, num_dirs);
      std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                        [&](int x, int y) { return vals[static_cast<std::size_t>(x)] < vals[static_cast<std::size_t>(y)]; });
      double best = vals[static_cast<std::size_t>(order[0])];
      for (int t = 0; t < starts; ++t) {
        std::vector<double> u(dirs.row_ptr(order[static_cast<std::size_t>(t)]),
                              dirs.row_ptr(order[static_cast<std::size_t>(t)]) + rb);
        best = std::min(best, coordinate_descent(f, std::move(u),
                                                 vals[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])]));
      }
      return best;
    };
    inf_f1 = descend(vals1, [&](const double* u) { return obj.f1(u, rb); });
    inf_f2 = descend(vals2, [&](const double* u) { return obj.f2(u, rb); });
    rep.infimum_method = "sampled";
  }

  rep.xi = inf_f2;
  rep.lhs_first = 0.5 * inf_f1;
  const double v_row = vec_norm2(gemv_t(split.r_b, v));
  rep.coherence_ratio = v_null / std::max(v_row, 1e-300);
  rep.lhs_second = 0.5 * rep.coherence_ratio * inf_f2;
  rep.probability_bound = 1.0;
  finish_report(rep);
  return rep;
}

ConditionReport lemma1_conditions(const DenseMatrix& b, const DenseMatrix& s,
                                  int col_index, double t1, double t2) {
  if (b.empty() || s.empty()) throw InvalidInputError("lemma1_conditions: empty matrix");
  if (b.rows() != s.rows() || b.cols() != s.cols())
    throw InvalidInputError("lemma1_conditions: B and S must share their shape");
  const int n = b.cols();
  if (col_index < 0 || col_index >= n)
    throw InvalidInputError("lemma1_conditions: column index out of range");
  if (!(t1 >= 0.0) || !std::isfinite(t1))
    throw InvalidInputError("lemma1_conditions: t1 must be >= 0");
  if (!(t2 > 1.0) || !std::isfinite(t2))
    throw InvalidInputError("lemma1_conditions: t2 must exceed 1");

  // Oracle point for v = e_i, solved tightly so the row classification is
  // clear of the support tolerance.
  SolverConfig tight;
  tight.max_iters = 20000;
  tight.abs_tol = 1e-11;
  tight.rel_tol = 1e-10;
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(col_index)] = 1.0;
  const SolveOutcome oracle = oracle_solve(b, s, e, tight);

  const RowSpaceSplit split = split_row_space(b);
  if (split.rank < 2)
    throw UnsupportedRegimeError("lemma1_conditions: needs a row-space dimension of at least 2");

  ConditionReport rep;
  rep.support = support_sets(s, oracle.solution);
  rep.xi = xi_bound(b.rows(), rep.support.n_s, split.rank, t1);

  const auto& k = kern::active();
  double sum_s = 0.0;
  {
    std::size_t zi = 0;
    for (int i : rep.support.z_orthogonal_set) {
      while (zi < rep.support.zero_row_set.size() && rep.support.zero_row_set[zi] < i) ++zi;
      const bool zero = zi < rep.support.zero_row_set.size() &&
                        rep.support.zero_row_set[zi] == i;
      if (!zero)
        sum_s += std::sqrt(k.sqsum(s.row_ptr(i), static_cast<std::size_t>(n)));
    }
  }
  const double deviation =
      std::sqrt(static_cast<double>(rep.support.n_s - rep.support.n_s_prime)) * t2;
  rep.alpha_norm = deviation;

  rep.lhs_first = 0.5 * rep.xi;
  rep.rhs_first = static_cast<double>(rep.support.n_s_prime) + sum_s + deviation;

  const double ei_null = std::sqrt(k.sqsum(split.p_b.row_ptr(col_index),
                                           static_cast<std::size_t>(split.p_b.cols())));
  const double ei_row = std::sqrt(k.sqsum(split.r_b.row_ptr(col_index),
                                          static_cast<std::size_t>(split.r_b.cols())));
  rep.coherence_ratio = ei_null / std::max(ei_row, 1e-300);
  rep.lhs_second = 0.5 * rep.coherence_ratio * rep.xi;
  rep.rhs_second = sum_s + deviation;

  rep.infimum_method = "closed_form";
  rep.probability_bound =
      1.0 - std::exp(-0.5 * t1 * t1) - lemma3_tail(split.rank, t2);
  finish_report(rep);
  return rep;
}

}  // namespace lsc
