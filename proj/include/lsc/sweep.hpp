#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsc/randomized.hpp"
#include "lsc/sa.hpp"
#include "lsc/synth.hpp"

namespace lsc {

enum class SuccessRule {
  outlier_exact,     // detected index set == ground truth, exactly
  eq17,              // rank(U_hat) = r AND exact indices AND ‖(I−UU^T)U_hat‖_F <= 1e-3
  log_error_below,   // subspace log10 recovery error < rule_threshold
};

SuccessRule success_rule_from_string(const std::string& s);

struct SweepAxis {
  std::string name;            // r | rho | k | n1 | n2 | clusters | m1 | m2
  std::vector<double> values;  // integer-valued parameters are rounded
};

struct SweepSpec {
  SweepAxis axis1;
  SweepAxis axis2;  // empty values => single-axis sweep (reported as 0)
  ModelParams fixed;
  int trials_per_cell = 10;
  SuccessRule rule = SuccessRule::outlier_exact;
  double rule_threshold = -3.0;  // log_error_below cutoff
  std::uint64_t base_seed = 0;
  std::string method = "sa";  // sa | pcp | randomized (what log_error_below runs)
  SaConfig sa;                // detection / decomposition knobs
  SketchConfig sketch;        // randomized-pipeline knobs (m1/m2 may be axes)
  int jobs = 0;               // work pool width across trials
};

struct SweepCell {
  double axis1_value = 0.0;
  double axis2_value = 0.0;
  double success_rate = 0.0;
  double mean_metric = 0.0;  // NaN when no trial produced a metric
  int trials = 0;
  double seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // axis1-major, then axis2
  double total_seconds = 0.0;
};

// Runs trials_per_cell derived-seed trials per grid cell (seed =
// mix64(base_seed, linear trial index); the layout never depends on the
// execution schedule, so the emitted CSV is byte-identical across runs and
// job counts). Trial errors count as failures and never abort the sweep.
// csv_path empty => no file. CSV header:
//   axis1,axis2,success_rate,mean_metric,trials
SweepResult run_sweep(const SweepSpec& spec, const std::string& csv_path = "");

struct Table1Row {
  int r = 0;
  bool control = false;  // K = 0, no column penalty
  double sparse_error = 0.0;  // ‖S' − S_hat'‖_F / ‖S'‖_F over non-outlier columns
};

// The combined-program baseline table: 200x400, rho = 0.01, K = 100,
// r in {2, 5, 10, 15}, plus a clean control row per r. CSV header:
//   r,control,sparse_error
std::vector<Table1Row> run_table1(std::uint64_t base_seed, const SolverConfig& solver,
                                  const std::string& csv_path = "");

}  // namespace lsc
