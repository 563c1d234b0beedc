#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>

#include "lsc/errors.hpp"
#include "lsc/mat_ops.hpp"
#include "lsc/synth.hpp"

namespace fs = std::filesystem;
using lsc::DenseMatrix;
using lsc::Instance;
using lsc::ModelParams;

namespace {

ModelParams base_params() {
  ModelParams p;
  p.n1 = 40;
  p.n2 = 80;
  p.rank_r = 3;
  p.rho = 0.05;
  p.num_outliers_k = 10;
  p.seed = 1234;
  return p;
}

bool is_zero_col(const DenseMatrix& m, int j) {
  for (int i = 0; i < m.rows(); ++i)
    if (m(i, j) != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("instances are bitwise reproducible") {
  const ModelParams p = base_params();
  const Instance a = lsc::generate_instance(p);
  const Instance b = lsc::generate_instance(p);
  REQUIRE(a.d.rows() == b.d.rows());
  for (int i = 0; i < a.d.rows(); ++i)
    for (int j = 0; j < a.d.cols(); ++j) CHECK(a.d(i, j) == b.d(i, j));
  CHECK(a.outlier_indices == b.outlier_indices);

  ModelParams q = p;
  q.seed = 1235;
  const Instance c = lsc::generate_instance(q);
  CHECK(lsc::frob_dist(a.d, c.d) > 0.0);
}

TEST_CASE("parts add up exactly and live where they should") {
  const Instance inst = lsc::generate_instance(base_params());
  REQUIRE(inst.d.rows() == 40);
  REQUIRE(inst.d.cols() == 80);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 80; ++j)
      CHECK(inst.d(i, j) - inst.l(i, j) - inst.s(i, j) - inst.c(i, j) == 0.0);

  REQUIRE(inst.outlier_indices.size() == 10);
  CHECK(std::is_sorted(inst.outlier_indices.begin(), inst.outlier_indices.end()));
  const std::set<int> outliers(inst.outlier_indices.begin(), inst.outlier_indices.end());
  REQUIRE(outliers.size() == 10);
  for (int j = 0; j < 80; ++j) {
    if (outliers.count(j)) {
      CHECK(is_zero_col(inst.l, j));
      CHECK(is_zero_col(inst.s, j));
      CHECK(!is_zero_col(inst.c, j));
    } else {
      CHECK(is_zero_col(inst.c, j));
    }
  }
  CHECK(lsc::numerical_rank(inst.l) == 3);
}

TEST_CASE("sparse support tracks rho") {
  ModelParams p = base_params();
  p.n1 = 100;
  p.n2 = 200;
  p.num_outliers_k = 0;
  p.rho = 0.1;
  p.sparse_amplitude = 2.5;
  const Instance inst = lsc::generate_instance(p);
  int nnz = 0;
  double amax = 0.0;
  for (int i = 0; i < p.n1; ++i)
    for (int j = 0; j < p.n2; ++j)
      if (inst.s(i, j) != 0.0) {
        ++nnz;
        amax = std::max(amax, std::fabs(inst.s(i, j)));
      }
  const double frac = static_cast<double>(nnz) / (100.0 * 200.0);
  CHECK(frac == doctest::Approx(0.1).epsilon(0.15));  // binomial concentration
  CHECK(amax <= 2.5 + 1e-12);
  CHECK(inst.outlier_indices.empty());
  for (int j = 0; j < p.n2; ++j) CHECK(is_zero_col(inst.c, j));
}

TEST_CASE("leading outliers occupy a prefix and scale as asked") {
  ModelParams p = base_params();
  p.leading_outliers = true;
  p.num_outliers_k = 7;
  p.outlier_scale = 4.0;
  const Instance inst = lsc::generate_instance(p);
  REQUIRE(inst.outlier_indices.size() == 7);
  for (int j = 0; j < 7; ++j) CHECK(inst.outlier_indices[static_cast<std::size_t>(j)] == j);

  // outlier column magnitudes sit near outlier_scale x the RMS column norm of L
  double l_sq = 0.0;
  const auto ln = lsc::col_norms(inst.l);
  int inlier_count = 0;
  for (int j = 7; j < inst.l.cols(); ++j) {
    l_sq += ln[static_cast<std::size_t>(j)] * ln[static_cast<std::size_t>(j)];
    ++inlier_count;
  }
  const double rms = std::sqrt(l_sq / inlier_count);
  const auto cn = lsc::col_norms(inst.c);
  for (int j = 0; j < 7; ++j)
    CHECK(cn[static_cast<std::size_t>(j)] == doctest::Approx(4.0 * rms).epsilon(1e-9));
}

TEST_CASE("clustered instances split the column space") {
  ModelParams p = base_params();
  p.n1 = 60;
  p.n2 = 90;
  p.rank_r = 6;
  p.num_clusters = 3;
  p.rho = 0.0;
  p.num_outliers_k = 0;
  const Instance inst = lsc::generate_instance(p);
  CHECK(lsc::numerical_rank(inst.l) == 6);
  // each cluster's columns live in a rank-2 slice
  for (int c = 0; c < 3; ++c) {
    std::vector<int> members;
    for (int j = c; j < 90; j += 3) members.push_back(j);
    CHECK(lsc::numerical_rank(inst.l.columns(members)) == 2);
  }
}

TEST_CASE("parameter validation") {
  ModelParams p = base_params();
  p.rho = 1.5;
  CHECK_THROWS_AS(lsc::validate(p), lsc::InvalidInputError);
  p = base_params();
  p.rank_r = 0;
  CHECK_THROWS_AS(lsc::validate(p), lsc::InvalidInputError);
  p = base_params();
  p.num_outliers_k = 81;  // more outliers than columns
  CHECK_THROWS_AS(lsc::validate(p), lsc::InvalidInputError);
  p = base_params();
  p.rank_r = 41;  // above n1
  CHECK_THROWS_AS(lsc::validate(p), lsc::InvalidInputError);
  p = base_params();
  p.rank_r = 6;
  p.num_clusters = 4;  // must divide rank_r
  CHECK_THROWS_AS(lsc::validate(p), lsc::InvalidInputError);
  p = base_params();
  p.num_outliers_k = 80;  // every column an outlier is allowed
  CHECK_NOTHROW(lsc::validate(p));
  CHECK_NOTHROW(lsc::validate(base_params()));
}

TEST_CASE("instance directory roundtrip") {
  const fs::path dir = fs::temp_directory_path() /
                       ("lsc_synth_" + std::to_string(::getpid()));
  const Instance inst = lsc::generate_instance(base_params());
  lsc::write_instance(inst, dir.string());
  const Instance back = lsc::load_instance(dir.string());
  CHECK(lsc::frob_dist(inst.d, back.d) == 0.0);
  CHECK(lsc::frob_dist(inst.l, back.l) == 0.0);
  CHECK(lsc::frob_dist(inst.s, back.s) == 0.0);
  CHECK(lsc::frob_dist(inst.c, back.c) == 0.0);
  CHECK(inst.outlier_indices == back.outlier_indices);
  CHECK(back.params.rank_r == 3);
  CHECK(back.params.seed == 1234);
  fs::remove_all(dir);
}

TEST_CASE("unit sphere samples have unit norm") {
  lsc::Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto v = lsc::sample_unit_sphere(9, rng);
    double nn = 0.0;
    for (double x : v) nn += x * x;
    CHECK(std::sqrt(nn) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
