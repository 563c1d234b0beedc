#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsc/dense_matrix.hpp"
#include "lsc/rng.hpp"

namespace lsc {

struct ModelParams {
  int n1 = 0;
  int n2 = 0;
  int rank_r = 1;
  double rho = 0.0;
  int num_outliers_k = 0;
  double sparse_amplitude = 1.0;
  int num_clusters = 1;
  std::uint64_t seed = 0;
  // Extras beyond the core model: place outliers in the first K columns
  // instead of uniformly random positions, and scale their magnitude relative
  // to the RMS column norm of L.
  bool leading_outliers = false;
  double outlier_scale = 1.0;
};

void validate(const ModelParams& p);

// A generated problem with ground truth. d = l + s + c holds exactly
// (elementwise, evaluated left to right); columns of l and s at
// outlier_indices are zero; c is zero away from them.
struct Instance {
  DenseMatrix d, l, s, c;
  std::vector<int> outlier_indices;  // sorted ascending
  ModelParams params;
};

// g / ‖g‖ with g standard normal; uniform on the sphere.
std::vector<double> sample_unit_sphere(int dim, Rng& rng);

// Draw order (fixed; instances are bitwise-reproducible from the seed):
// outlier positions, then U (row-major), then Q (row-major; per-column
// cluster coefficients when num_clusters > 1), then S (row-major, one value
// draw per support hit), then one sphere direction per outlier column in
// ascending column order.
Instance generate_instance(const ModelParams& params);

// Instance directory: D.csv, L.csv, S.csv, C.csv + meta.json.
void write_instance(const Instance& inst, const std::string& dir);
Instance load_instance(const std::string& dir);

}  // namespace lsc
