#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsc/errors.hpp"
#include "lsc/linalg.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/pcp.hpp"
#include "lsc/randomized.hpp"
#include "lsc/rng.hpp"
#include "lsc/sa.hpp"
#include "lsc/solvers.hpp"
#include "lsc/sweep.hpp"
#include "lsc/synth.hpp"
#include "lsc/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --input accepts either a matrix CSV or an instance directory holding D.csv.
lsc::DenseMatrix load_data(const std::string& input) {
  if (fs::is_directory(input)) return lsc::read_csv_matrix((fs::path(input) / "D.csv").string());
  return lsc::read_csv_matrix(input);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw lsc::InvalidInputError("cannot create output directory " + dir);
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw lsc::InvalidInputError("cannot open " + path);
  f << j.dump(2) << "\n";
}

void write_outliers(const std::vector<int>& idx, const std::string& path) {
  write_json(json{{"outlier_indices", idx}}, path);
}

void write_certificates(const lsc::DetectionReport& rep, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw lsc::InvalidInputError("cannot open " + path);
  std::fputs("column_index,dominant_fraction,converged\n", f);
  for (const auto& c : rep.certificates)
    std::fprintf(f, "%d,%.17g,%d\n", c.column_index, c.dominant_fraction,
                 c.solver_converged ? 1 : 0);
  std::fclose(f);
}

json report_to_json(const lsc::ConditionReport& rep) {
  return json{{"xi", rep.xi},
              {"lhs_first", rep.lhs_first},
              {"rhs_first", rep.rhs_first},
              {"lhs_second", rep.lhs_second},
              {"rhs_second", rep.rhs_second},
              {"coherence_ratio", rep.coherence_ratio},
              {"alpha_norm", rep.alpha_norm},
              {"holds", rep.holds},
              {"infimum_method", rep.infimum_method},
              {"certification", rep.certification},
              {"probability_bound", rep.probability_bound},
              {"n_s", rep.support.n_s},
              {"n_s_prime", rep.support.n_s_prime},
              {"zero_rows", rep.support.zero_row_set.size()},
              {"orthogonal_rows", rep.support.z_orthogonal_set.size()}};
}

// The theory checkers run on the clean and sparse parts of an instance,
// restricted to its non-outlier columns (the lemma's A = B + S has no column
// corruptions); --col indexes that restricted matrix.
struct TheoryInput {
  lsc::DenseMatrix b, s;
};

TheoryInput load_theory_input(const std::string& dir) {
  const lsc::Instance inst = lsc::load_instance(dir);
  std::vector<int> inliers;
  std::size_t k = 0;
  for (int j = 0; j < inst.d.cols(); ++j) {
    if (k < inst.outlier_indices.size() && inst.outlier_indices[k] == j) {
      ++k;
    } else {
      inliers.push_back(j);
    }
  }
  if (inliers.empty())
    throw lsc::DegenerateInputError("instance has no non-outlier columns");
  return {inst.l.columns(inliers), inst.s.columns(inliers)};
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string tok = text.substr(pos, next - pos);
    if (tok.empty()) throw lsc::InvalidInputError("empty value in grid: " + text);
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw lsc::InvalidInputError("bad grid value: " + tok);
    }
    pos = next + 1;
  }
  if (vals.empty()) throw lsc::InvalidInputError("empty grid: " + text);
  return vals;
}

lsc::SweepAxis parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw lsc::InvalidInputError("axis must look like name=v1,v2,... got: " + text);
  return {text.substr(0, eq), parse_grid(text.substr(eq + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank + sparse + column-outlier decomposition toolkit"};
  app.set_config("--config", "", "read options from a key=value file");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
  app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
  app.add_option("--jobs", jobs, "parallel width (0 = hardware)")->capture_default_str();
  app.add_option("--out", out, "output directory or file");

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "sample a synthetic instance");
  lsc::ModelParams params;
  params.n1 = 100;
  params.n2 = 200;
  params.rank_r = 5;
  gen->add_option("--n1", params.n1, "rows")->capture_default_str();
  gen->add_option("--n2", params.n2, "columns")->capture_default_str();
  gen->add_option("--r", params.rank_r, "rank of the clean part")->capture_default_str();
  gen->add_option("--rho", params.rho, "sparse support probability")->capture_default_str();
  gen->add_option("--k", params.num_outliers_k, "outlier column count")->capture_default_str();
  gen->add_option("--amplitude", params.sparse_amplitude, "sparse value scale")
      ->capture_default_str();
  gen->add_option("--clusters", params.num_clusters, "clustered column-space blocks")
      ->capture_default_str();
  gen->add_flag("--leading", params.leading_outliers, "outliers occupy the first K columns");
  gen->add_option("--outlier-scale", params.outlier_scale, "outlier magnitude multiplier")
      ->capture_default_str();

  // ---- decompose ----
  auto* dec = app.add_subcommand("decompose", "run a decomposition");
  dec->require_subcommand(1);
  std::string input;
  double lambda = -1.0;  // negative = per-method default
  double gamma = -1.0;
  double tol = 1e-7;
  int max_iters = 2000;
  for (const char* name : {"pcp", "pcp-l12", "sa", "randomized"}) {
    auto* sub = dec->add_subcommand(name);
    sub->add_option("--input", input, "matrix CSV or instance directory")->required();
    sub->add_option("--lambda", lambda, "sparsity penalty (negative = default)");
    sub->add_option("--tol", tol, "convergence tolerance")->capture_default_str();
    sub->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
  }
  dec->get_subcommand("pcp-l12")->add_option("--gamma", gamma,
                                             "column penalty (negative = default)");
  double mag_threshold = 0.1, frac_threshold = 0.4;
  for (const char* name : {"sa", "randomized"}) {
    auto* sub = dec->get_subcommand(name);
    sub->add_option("--mag-threshold", mag_threshold, "certificate magnitude cut")
        ->capture_default_str();
    sub->add_option("--frac-threshold", frac_threshold, "outlier fraction cut")
        ->capture_default_str();
  }
  int m1 = 0, m2 = 0, rank_hint = 0;
  double sparse_col_threshold = 0.4;
  {
    auto* sub = dec->get_subcommand("randomized");
    sub->add_option("--m1", m1, "sampled columns")->required();
    sub->add_option("--m2", m2, "sampled rows")->required();
    sub->add_option("--sparse-col-threshold", sparse_col_threshold,
                    "sketched-residual outlier cut")
        ->capture_default_str();
    sub->add_option("--rank-hint", rank_hint, "force the learned rank");
  }

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "evaluate the sufficient conditions");
  ver->require_subcommand(1);
  std::string instance_dir;
  int col = 0, dirs = 10000;
  double t1 = 2.0, t2 = 2.0;
  for (const char* name : {"lemma1", "theorem2"}) {
    auto* sub = ver->add_subcommand(name);
    sub->add_option("--instance", instance_dir, "instance directory")->required();
    sub->add_option("--col", col, "column index in the outlier-free matrix")
        ->capture_default_str();
  }
  ver->get_subcommand("lemma1")->add_option("--t1", t1, "first tail parameter")
      ->capture_default_str();
  ver->get_subcommand("lemma1")->add_option("--t2", t2, "second tail parameter (> 1)")
      ->capture_default_str();
  ver->get_subcommand("theorem2")->add_option("--dirs", dirs, "sampled directions")
      ->capture_default_str();

  // ---- sweep ----
  auto* swp = app.add_subcommand("sweep", "Monte Carlo grid sweep");
  std::string axis1_text, axis2_text, rule_text = "outlier_exact", method = "sa";
  double threshold = -3.0;
  int trials = 10;
  lsc::ModelParams fixed;
  fixed.n1 = 100;
  fixed.n2 = 100;
  fixed.rank_r = 5;
  swp->add_option("--axis1", axis1_text, "name=v1,v2,... (r|rho|k|n1|n2|clusters|m1|m2)")
      ->required();
  swp->add_option("--axis2", axis2_text, "optional second axis");
  swp->add_option("--rule", rule_text, "outlier_exact|eq17|log_error_below")
      ->capture_default_str();
  swp->add_option("--threshold", threshold, "log_error_below cutoff")->capture_default_str();
  swp->add_option("--trials", trials, "trials per cell")->capture_default_str();
  swp->add_option("--method", method, "sa|pcp|randomized")->capture_default_str();
  swp->add_option("--n1", fixed.n1)->capture_default_str();
  swp->add_option("--n2", fixed.n2)->capture_default_str();
  swp->add_option("--r", fixed.rank_r)->capture_default_str();
  swp->add_option("--rho", fixed.rho)->capture_default_str();
  swp->add_option("--k", fixed.num_outliers_k)->capture_default_str();
  swp->add_option("--clusters", fixed.num_clusters)->capture_default_str();
  swp->add_flag("--leading", fixed.leading_outliers);
  int sweep_m1 = 0, sweep_m2 = 0;
  swp->add_option("--m1", sweep_m1, "sketch columns (eq17/randomized)");
  swp->add_option("--m2", sweep_m2, "sketch rows (eq17/randomized)");

  // ---- table1 ----
  auto* tbl = app.add_subcommand("table1", "combined-program baseline table");
  int tbl_max_iters = 2000;
  double tbl_tol = 1e-7;
  tbl->add_option("--max-iters", tbl_max_iters)->capture_default_str();
  tbl->add_option("--tol", tbl_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (out.empty()) throw lsc::InvalidInputError("generate needs --out <dir>");
      params.seed = seed;
      const lsc::Instance inst = lsc::generate_instance(params);
      ensure_dir(out);
      lsc::write_instance(inst, out);
      std::printf("wrote instance (%dx%d, %zu outliers) to %s\n", inst.d.rows(),
                  inst.d.cols(), inst.outlier_indices.size(), out.c_str());
      return 0;
    }

    if (dec->parsed()) {
      if (out.empty()) throw lsc::InvalidInputError("decompose needs --out <dir>");
      const lsc::DenseMatrix d = load_data(input);
      lsc::SolverConfig solver;
      solver.abs_tol = tol;
      solver.max_iters = max_iters;
      ensure_dir(out);
      const fs::path outdir(out);

      if (dec->get_subcommand("pcp")->parsed() ||
          dec->get_subcommand("pcp-l12")->parsed()) {
        const bool with_column = dec->get_subcommand("pcp-l12")->parsed();
        const double lam = lambda > 0.0 ? lambda : lsc::pcp_auto_lambda(d);
        lsc::PcpResult res;
        if (with_column) {
          const double gam = gamma > 0.0 ? gamma : lsc::pcp_auto_gamma(d);
          res = lsc::pcp_outlier_decompose(d, lam, gam, solver);
          lsc::write_csv_matrix(res.column_part, (outdir / "C.csv").string());
        } else {
          res = lsc::pcp_decompose(d, lam, solver);
        }
        lsc::write_csv_matrix(res.low_rank, (outdir / "L.csv").string());
        lsc::write_csv_matrix(res.sparse, (outdir / "S.csv").string());
        write_json(json{{"iterations", res.iterations},
                        {"converged", res.converged},
                        {"constraint_residual", res.constraint_residual}},
                   (outdir / "diagnostics.json").string());
        std::printf("%s: %d iterations, residual %.3g%s\n",
                    with_column ? "pcp-l12" : "pcp", res.iterations,
                    res.constraint_residual, res.converged ? "" : " (not converged)");
        return 0;
      }

      if (dec->get_subcommand("sa")->parsed()) {
        lsc::SaConfig cfg;
        cfg.lambda = lambda;
        cfg.mag_threshold = mag_threshold;
        cfg.outlier_fraction_threshold = frac_threshold;
        cfg.solver = solver;
        cfg.jobs = jobs;
        const lsc::Decomposition res = lsc::sa_decompose(d, cfg);
        lsc::write_csv_matrix(res.low_rank, (outdir / "L.csv").string());
        lsc::write_csv_matrix(res.sparse, (outdir / "S.csv").string());
        write_outliers(res.outlier_indices, (outdir / "outliers.json").string());
        write_certificates(res.detection, (outdir / "certificates.csv").string());
        std::printf("sa: flagged %zu of %d columns\n", res.outlier_indices.size(),
                    d.cols());
        return 0;
      }

      // randomized, with up to 3 derived-seed retries when the sketch
      // misses every inlier
      lsc::SketchConfig cfg;
      cfg.m1 = m1;
      cfg.m2 = m2;
      cfg.seed = seed;
      cfg.sa.lambda = lambda;
      cfg.sa.mag_threshold = mag_threshold;
      cfg.sa.outlier_fraction_threshold = frac_threshold;
      cfg.sa.solver = solver;
      cfg.sa.jobs = jobs;
      cfg.sparse_col_threshold = sparse_col_threshold;
      cfg.rank_hint = rank_hint;
      lsc::RandomizedResult res;
      for (int attempt = 0;; ++attempt) {
        try {
          res = lsc::randomized_decompose(d, cfg);
          break;
        } catch (const lsc::ResampleNeededError& e) {
          if (attempt >= 3) throw;
          cfg.seed = lsc::mix64(e.seed, static_cast<std::uint64_t>(attempt) + 1);
          std::fprintf(stderr, "resampling with derived seed %llu\n",
                       static_cast<unsigned long long>(cfg.seed));
        }
      }
      lsc::write_csv_matrix(res.low_rank, (outdir / "L.csv").string());
      lsc::write_csv_matrix(res.sparse, (outdir / "S.csv").string());
      lsc::write_csv_matrix(res.basis_u_hat, (outdir / "U_hat.csv").string());
      write_outliers(res.outlier_indices, (outdir / "outliers.json").string());
      write_json(json{{"r_hat", res.diagnostics.r_hat},
                      {"sampled_columns", res.diagnostics.sampled_columns},
                      {"sampled_rows", res.diagnostics.sampled_rows},
                      {"timings",
                       {{"cs_seconds", res.diagnostics.cs_seconds},
                        {"representation_seconds", res.diagnostics.representation_seconds},
                        {"detection_seconds", res.diagnostics.detection_seconds},
                        {"assembly_seconds", res.diagnostics.assembly_seconds}}}},
                 (outdir / "diagnostics.json").string());
      std::printf("randomized: r_hat %d, flagged %zu of %d columns\n",
                  res.diagnostics.r_hat, res.outlier_indices.size(), d.cols());
      return 0;
    }

    if (ver->parsed()) {
      const TheoryInput in = load_theory_input(instance_dir);
      lsc::ConditionReport rep;
      if (ver->get_subcommand("lemma1")->parsed()) {
        rep = lsc::lemma1_conditions(in.b, in.s, col, t1, t2);
      } else {
        if (col < 0 || col >= in.b.cols())
          throw lsc::InvalidInputError("--col out of range");
        std::vector<double> e(static_cast<std::size_t>(in.b.cols()), 0.0);
        e[static_cast<std::size_t>(col)] = 1.0;
        lsc::SolverConfig tight;
        tight.max_iters = 20000;
        tight.abs_tol = 1e-11;
        tight.rel_tol = 1e-10;
        const lsc::SolveOutcome oracle = lsc::oracle_solve(in.b, in.s, e, tight);
        rep = lsc::theorem2_conditions(in.b, in.s, e, oracle.solution, dirs, seed);
      }
      std::printf("%s\n", report_to_json(rep).dump(2).c_str());
      return 0;
    }

    if (swp->parsed()) {
      lsc::SweepSpec spec;
      spec.axis1 = parse_axis(axis1_text);
      if (!axis2_text.empty()) spec.axis2 = parse_axis(axis2_text);
      spec.fixed = fixed;
      spec.trials_per_cell = trials;
      spec.rule = lsc::success_rule_from_string(rule_text);
      spec.rule_threshold = threshold;
      spec.base_seed = seed;
      spec.method = method;
      spec.jobs = jobs;
      spec.sketch.m1 = sweep_m1;
      spec.sketch.m2 = sweep_m2;
      const lsc::SweepResult res = lsc::run_sweep(spec, out);
      std::printf("sweep: %zu cells in %.1fs%s%s\n", res.cells.size(), res.total_seconds,
                  out.empty() ? "" : ", wrote ", out.c_str());
      return 0;
    }

    if (tbl->parsed()) {
      lsc::SolverConfig solver;
      solver.max_iters = tbl_max_iters;
      solver.abs_tol = tbl_tol;
      const auto rows = lsc::run_table1(seed, solver, out);
      for (const auto& r : rows)
        std::printf("r=%2d %s  sparse error %.4f\n", r.r,
                    r.control ? "control" : "full   ", r.sparse_error);
      return 0;
    }
  } catch (const lsc::InvalidInputError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const lsc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
