#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsc/dense_matrix.hpp"

namespace lsc {

struct SupportSets {
  std::vector<int> zero_row_set;      // L_S: rows of S that vanish
  std::vector<int> z_orthogonal_set;  // L_z: rows with s_k^T z = 0
  int n_s = 0;                        // |L_S^c|, number of nonzero rows
  int n_s_prime = 0;                  // |L_z ∩ L_S^c|, nonzero rows orthogonal to z
};

struct ConditionReport {
  // Permeance quantity entering the second inequality: the closed-form bound
  // for the randomized-row check, or the evaluated infimum of Σ_{L_S}|b_i^T δ|
  // for the deterministic check.
  double xi = 0.0;
  double lhs_first = 0.0;
  double rhs_first = 0.0;
  double lhs_second = 0.0;
  double rhs_second = 0.0;
  double coherence_ratio = 0.0;  // ‖v^T P_b‖ / ‖v^T R_b‖
  // ‖α‖₂ for the deterministic check; the √(n_s − n_s')·t₂ deviation term for
  // the randomized-row check (which has no explicit α).
  double alpha_norm = 0.0;
  bool holds = false;
  std::string infimum_method;  // exact_lowdim | sampled | closed_form
  // "certified", "certified up to sampling" (a sampled infimum only upper
  // bounds the true one), or "conditions not satisfied".
  std::string certification;
  // Success probability of the randomized-row certificate; 1 for the
  // deterministic check.
  double probability_bound = 1.0;
  SupportSets support;
};

// Row classification of S against z: a row is zero when ‖s_k‖∞ <= zero_tol
// and orthogonal when |s_k^T z| <= zero_tol·‖s_k‖·‖z‖.
SupportSets support_sets(const DenseMatrix& s, const std::vector<double>& z,
                         double zero_tol = 1e-9);

// √(2/π)·(n1−n_s)/√r_b − 2·√(n1−n_s) − t1·√((n1−n_s)/(r_b−1)).
// r_b < 2 is outside the implemented regime (the formula divides by r_b − 1).
double xi_bound(int n1, int n_s, int r_b, double t1);

// The same arithmetic with n_s = 0: the probabilistic lower bound on
// inf_{δ} Σ_i |g_i^T δ| for n unit rows in an r-dimensional space, failing
// with probability at most exp(−t²/2).
double permeance_lower_bound(int n, int r, double t);

// Companion tail probability exp(−(r/2)(t² − log t² − 1)), valid for t > 1.
double lemma3_tail(int r, double t);

// α = Σ_i sgn(s_i^T z_star)·a_i over the rows of A, with sgn(0) = 0.
std::vector<double> alpha_vector(const DenseMatrix& a, const DenseMatrix& s,
                                 const std::vector<double>& z_star);

// Deterministic sufficient conditions for the null-space program
// min ‖(B+S) z‖₁ s.t. v^T z = 1 to return the oracle point z_star
// (which must satisfy B z = 0, v^T z = 1 within 1e-6):
//   (a) ½·inf_{δ∈row(B),‖δ‖=1} (Σ_{L_S}|b_i^T δ| − 2·Σ_{L_S^c∩L_z}|b_i^T δ|)
//         > Σ_{L_z}‖s_i‖ + ‖α‖
//   (b) (‖v^T P_b‖ / (2‖v^T R_b‖))·inf_{δ} Σ_{L_S}|b_i^T δ|  >  same RHS.
// The infimum is exact for dim(row(B)) <= 2 and sampled (num_dirs seeded
// directions plus coordinate descent) above that.
ConditionReport theorem2_conditions(const DenseMatrix& b, const DenseMatrix& s,
                                    const std::vector<double>& v,
                                    const std::vector<double>& z_star,
                                    int num_dirs = 10000, std::uint64_t seed = 0);

// Randomized-row sufficient conditions for column col_index: solves the
// oracle program internally (v = e_i), classifies the rows of S against the
// oracle point, and checks
//   (a) ½ξ > n_s' + Σ_{L_z}‖s_i‖ + √(n_s−n_s')·t₂
//   (b) (‖e_i^T P_b‖/(2‖e_i^T R_b‖))·ξ > Σ_{L_z}‖s_i‖ + √(n_s−n_s')·t₂
// and reports the success probability
//   1 − exp(−t₁²/2) − exp(−(r_b/2)(t₂² − log t₂² − 1)).
ConditionReport lemma1_conditions(const DenseMatrix& b, const DenseMatrix& s,
                                  int col_index, double t1 = 2.0, double t2 = 2.0);

}  // namespace lsc
