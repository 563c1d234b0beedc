#include "lsc/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lsc/errors.hpp"
#include "lsc/linalg.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/parallel.hpp"
#include "lsc/pcp.hpp"
#include "lsc/svd.hpp"

namespace lsc {

SuccessRule success_rule_from_string(const std::string& s) {
  if (s == "outlier_exact") return SuccessRule::outlier_exact;
  if (s == "eq17") return SuccessRule::eq17;
  if (s == "log_error_below") return SuccessRule::log_error_below;
  throw InvalidInputError("unknown success rule: " + s);
}

namespace {

struct TrialSetup {
  ModelParams params;
  SketchConfig sketch;
};

void apply_axis(TrialSetup& t, const std::string& name, double value) {
  const int iv = static_cast<int>(std::llround(value));
  if (name == "r") {
    t.params.rank_r = iv;
  } else if (name == "rho") {
    t.params.rho = value;
  } else if (name == "k") {
    t.params.num_outliers_k = iv;
  } else if (name == "n1") {
    t.params.n1 = iv;
  } else if (name == "n2") {
    t.params.n2 = iv;
  } else if (name == "clusters") {
    t.params.num_clusters = iv;
  } else if (name == "m1") {
    t.sketch.m1 = iv;
  } else if (name == "m2") {
    t.sketch.m2 = iv;
  } else {
    throw InvalidInputError("unknown sweep axis: " + name);
  }
}

// Top-k left singular vectors, for grading a recovered low-rank part whose
// numerical rank may exceed the model rank by solver noise.
DenseMatrix leading_basis(const DenseMatrix& a, int k) {
  const ThinSvd dec = svd_thin(a, 1e-14);
  const int cols = std::min(k, dec.rank());
  if (cols < 1 || dec.singular_values[0] == 0.0) return {};
  DenseMatrix u(a.rows(), cols);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < cols; ++j) u(i, j) = dec.left_basis(i, j);
  return u;
}

struct TrialOutcome {
  bool success = false;
  bool has_metric = false;
  double metric = 0.0;
};

TrialOutcome run_trial(const SweepSpec& spec, const TrialSetup& setup,
                       std::uint64_t seed) {
  TrialOutcome out;
  ModelParams p = setup.params;
  p.seed = seed;
  const Instance inst = generate_instance(p);

  switch (spec.rule) {
    case SuccessRule::outlier_exact: {
      const DetectionReport rep = detect_outliers(inst.d, spec.sa);
      out.success = rep.outlier_indices == inst.outlier_indices;
      int mismatched = 0;
      std::size_t a = 0, b = 0;
      while (a < rep.outlier_indices.size() || b < inst.outlier_indices.size()) {
        if (a == rep.outlier_indices.size()) {
          ++mismatched;
          ++b;
        } else if (b == inst.outlier_indices.size()) {
          ++mismatched;
          ++a;
        } else if (rep.outlier_indices[a] == inst.outlier_indices[b]) {
          ++a;
          ++b;
        } else if (rep.outlier_indices[a] < inst.outlier_indices[b]) {
          ++mismatched;
          ++a;
        } else {
          ++mismatched;
          ++b;
        }
      }
      out.metric = static_cast<double>(mismatched);
      out.has_metric = true;
      break;
    }
    case SuccessRule::eq17: {
      SketchConfig sk = setup.sketch;
      sk.seed = seed;
      const RandomizedResult res = randomized_decompose(inst.d, sk);
      const DenseMatrix u_true = orthonormal_basis(inst.l);
      // ‖(I − U U^T) U_hat‖_F
      const DenseMatrix proj = matmul(u_true, matmul_tn(u_true, res.basis_u_hat));
      const double err = frob_dist(res.basis_u_hat, proj);
      out.metric = err;
      out.has_metric = true;
      out.success = res.basis_u_hat.cols() == p.rank_r &&
                    res.outlier_indices == inst.outlier_indices && err <= 1e-3;
      break;
    }
    case SuccessRule::log_error_below: {
      DenseMatrix l_hat;
      if (spec.method == "sa") {
        l_hat = sa_decompose(inst.d, spec.sa).low_rank;
      } else if (spec.method == "pcp") {
        l_hat = pcp_decompose(inst.d, default_lambda(inst.d.rows()), spec.sa.solver)
                    .low_rank;
      } else if (spec.method == "randomized") {
        SketchConfig sk = setup.sketch;
        sk.seed = seed;
        l_hat = randomized_decompose(inst.d, sk).low_rank;
      } else {
        throw InvalidInputError("unknown sweep method: " + spec.method);
      }
      const DenseMatrix u_true = orthonormal_basis(inst.l);
      const DenseMatrix u_hat = leading_basis(l_hat, p.rank_r);
      if (u_true.empty() || u_hat.empty()) {
        out.metric = 0.0;  // nothing to compare; count as failure
        break;
      }
      const double err = subspace_recovery_error(u_true, u_hat);
      out.metric = err;
      out.has_metric = true;
      out.success = err < spec.rule_threshold;
      break;
    }
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::string& csv_path) {
  if (spec.axis1.values.empty()) throw InvalidInputError("sweep: axis1 grid is empty");
  if (spec.trials_per_cell < 1) throw InvalidInputError("sweep: trials_per_cell must be >= 1");
  validate(spec.sa);
  if (spec.method != "sa" && spec.method != "pcp" && spec.method != "randomized")
    throw InvalidInputError("unknown sweep method: " + spec.method);

  std::vector<double> axis2_values = spec.axis2.values;
  const bool has_axis2 = !axis2_values.empty();
  if (!has_axis2) axis2_values.push_back(0.0);

  const int n1v = static_cast<int>(spec.axis1.values.size());
  const int n2v = static_cast<int>(axis2_values.size());
  const int cells = n1v * n2v;
  const int trials = spec.trials_per_cell;
  const int total = cells * trials;

  struct Slot {
    bool success = false;
    bool has_metric = false;
    double metric = 0.0;
    double seconds = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(total));

  const auto t_start = std::chrono::steady_clock::now();
  parallel_for(total, spec.jobs, [&](int idx) {
    const int cell = idx / trials;
    const int i1 = cell / n2v;
    const int i2 = cell % n2v;
    const auto t0 = std::chrono::steady_clock::now();
    TrialSetup setup{spec.fixed, spec.sketch};
    apply_axis(setup, spec.axis1.name, spec.axis1.values[static_cast<std::size_t>(i1)]);
    if (has_axis2)
      apply_axis(setup, spec.axis2.name, axis2_values[static_cast<std::size_t>(i2)]);
    Slot slot;
    try {
      const TrialOutcome r =
          run_trial(spec, setup, mix64(spec.base_seed, static_cast<std::uint64_t>(idx)));
      slot.success = r.success;
      slot.has_metric = r.has_metric;
      slot.metric = r.metric;
    } catch (const Error&) {
      // failed trial: counted unsuccessful, sweep continues
    }
    slot.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slots[static_cast<std::size_t>(idx)] = slot;
  });

  SweepResult result;
  result.cells.reserve(static_cast<std::size_t>(cells));
  for (int cell = 0; cell < cells; ++cell) {
    const int i1 = cell / n2v;
    const int i2 = cell % n2v;
    SweepCell c;
    c.axis1_value = spec.axis1.values[static_cast<std::size_t>(i1)];
    c.axis2_value = axis2_values[static_cast<std::size_t>(i2)];
    c.trials = trials;
    int successes = 0, with_metric = 0;
    double metric_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Slot& s = slots[static_cast<std::size_t>(cell * trials + t)];
      if (s.success) ++successes;
      if (s.has_metric) {
        ++with_metric;
        metric_sum += s.metric;
      }
      c.seconds += s.seconds;
    }
    c.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    c.mean_metric = with_metric > 0 ? metric_sum / static_cast<double>(with_metric)
                                    : std::numeric_limits<double>::quiet_NaN();
    result.cells.push_back(c);
  }
  result.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!csv_path.empty()) {
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (f == nullptr) throw InvalidInputError("sweep: cannot open " + csv_path);
    std::fputs("axis1,axis2,success_rate,mean_metric,trials\n", f);
    for (const SweepCell& c : result.cells) {
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%d\n", c.axis1_value, c.axis2_value,
                   c.success_rate, c.mean_metric, c.trials);
    }
    std::fclose(f);
  }
  return result;
}

std::vector<Table1Row> run_table1(std::uint64_t base_seed, const SolverConfig& solver,
                                  const std::string& csv_path) {
  const int kRanks[] = {2, 5, 10, 15};
  std::vector<Table1Row> rows;
  std::uint64_t row_index = 0;
  for (const int r : kRanks) {
    for (const bool control : {true, false}) {
      ModelParams p;
      p.n1 = 200;
      p.n2 = 400;
      p.rank_r = r;
      p.rho = 0.01;
      p.num_outliers_k = control ? 0 : 100;
      p.seed = mix64(base_seed, row_index++);
      const Instance inst = generate_instance(p);

      const double lambda = default_lambda(p.n1);
      // Fixed column penalty calibrated for this table's 200x400 regime: small
      // enough that the column part stays active, large enough that the r = 2
      // row mostly recovers S. The generic auto formula sits far below the
      // useful range here and flattens every row to total failure.
      const double gamma = 0.2;
      PcpResult dec;
      if (control) {
        dec = pcp_decompose(inst.d, lambda, solver);
      } else {
        dec = pcp_outlier_decompose(inst.d, lambda, gamma, solver);
      }

      // error over the non-outlier columns only
      std::vector<int> inliers;
      {
        std::size_t k = 0;
        for (int j = 0; j < p.n2; ++j) {
          if (k < inst.outlier_indices.size() && inst.outlier_indices[k] == j) {
            ++k;
          } else {
            inliers.push_back(j);
          }
        }
      }
      const DenseMatrix s_true = inst.s.columns(inliers);
      const DenseMatrix s_hat = dec.sparse.columns(inliers);
      const double denom = frob_norm(s_true);
      Table1Row row;
      row.r = r;
      row.control = control;
      row.sparse_error = denom > 0.0 ? frob_dist(s_true, s_hat) / denom
                                     : frob_norm(s_hat);
      rows.push_back(row);
    }
  }

  if (!csv_path.empty()) {
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (f == nullptr) throw InvalidInputError("table1: cannot open " + csv_path);
    std::fputs("r,control,sparse_error\n", f);
    for (const Table1Row& row : rows)
      std::fprintf(f, "%d,%d,%.17g\n", row.r, row.control ? 1 : 0, row.sparse_error);
    std::fclose(f);
  }
  return rows;
}

}  // namespace lsc
