#include "lsc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lsc/kernels.hpp"
#include "lsc/linalg.hpp"

namespace lsc {

namespace fs = std::filesystem;
using nlohmann::json;

void validate(const ModelParams& p) {
  if (p.n1 < 1 || p.n2 < 1)
    throw InvalidInputError("ModelParams: n1 and n2 must be positive");
  if (!(p.rho >= 0.0 && p.rho < 1.0))
    throw InvalidInputError("ModelParams: rho must lie in [0, 1)");
  if (p.num_outliers_k < 0 || p.num_outliers_k > p.n2)
    throw InvalidInputError("ModelParams: num_outliers_k must lie in [0, n2]");
  if (p.rank_r < 1) throw InvalidInputError("ModelParams: rank_r must be >= 1");
  if (p.rank_r > p.n1)
    throw InvalidInputError("ModelParams: rank_r exceeds n1");
  if (p.num_outliers_k < p.n2 && p.rank_r > p.n2 - p.num_outliers_k)
    throw InvalidInputError("ModelParams: rank_r exceeds n2 - num_outliers_k");
  if (!(p.sparse_amplitude >= 0.0))
    throw InvalidInputError("ModelParams: sparse_amplitude must be >= 0");
  if (p.num_clusters < 1)
    throw InvalidInputError("ModelParams: num_clusters must be >= 1");
  if (p.num_clusters > 1 && p.rank_r % p.num_clusters != 0)
    throw InvalidInputError("ModelParams: num_clusters must divide rank_r");
  if (!(p.outlier_scale > 0.0))
    throw InvalidInputError("ModelParams: outlier_scale must be positive");
}

std::vector<double> sample_unit_sphere(int dim, Rng& rng) {
  if (dim < 1) throw InvalidInputError("sample_unit_sphere: dim must be >= 1");
  std::vector<double> g(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& v : g) v = rng.normal();
    norm = std::sqrt(kern::active().sqsum(g.data(), g.size()));
  }
  kern::active().scal(1.0 / norm, g.data(), g.size());
  return g;
}

Instance generate_instance(const ModelParams& params) {
  validate(params);
  const int n1 = params.n1, n2 = params.n2, r = params.rank_r;
  const int k_out = params.num_outliers_k;
  Rng rng(params.seed);

  Instance inst;
  inst.params = params;

  // outlier positions
  if (params.leading_outliers) {
    inst.outlier_indices.resize(static_cast<std::size_t>(k_out));
    for (int i = 0; i < k_out; ++i) inst.outlier_indices[static_cast<std::size_t>(i)] = i;
  } else {
    inst.outlier_indices = rng.sample_without_replacement(n2, k_out);
    std::sort(inst.outlier_indices.begin(), inst.outlier_indices.end());
  }
  std::vector<char> is_outlier(static_cast<std::size_t>(n2), 0);
  for (const int j : inst.outlier_indices) is_outlier[static_cast<std::size_t>(j)] = 1;

  // L = U Q with standard-normal factors; clustered columns draw their
  // coefficients inside the cluster's block of U.
  DenseMatrix u(n1, r);
  for (std::size_t i = 0; i < u.size(); ++i) u.data()[i] = rng.normal();
  if (params.num_clusters == 1) {
    DenseMatrix q(r, n2);
    for (std::size_t i = 0; i < q.size(); ++i) q.data()[i] = rng.normal();
    inst.l = matmul(u, q);
  } else {
    const int rc = r / params.num_clusters;
    inst.l = DenseMatrix(n1, n2);
    std::vector<double> q(static_cast<std::size_t>(rc));
    for (int j = 0; j < n2; ++j) {
      const int cluster = j % params.num_clusters;
      for (auto& v : q) v = rng.normal();
      for (int i = 0; i < n1; ++i) {
        double acc = 0.0;
        const double* urow = u.row_ptr(i) + cluster * rc;
        for (int l = 0; l < rc; ++l) acc += urow[l] * q[static_cast<std::size_t>(l)];
        inst.l(i, j) = acc;
      }
    }
  }
  for (const int j : inst.outlier_indices)
    for (int i = 0; i < n1; ++i) inst.l(i, j) = 0.0;

  // S: Bernoulli support, uniform values
  inst.s = DenseMatrix(n1, n2);
  const double a = params.sparse_amplitude;
  for (int i = 0; i < n1; ++i) {
    double* row = inst.s.row_ptr(i);
    for (int j = 0; j < n2; ++j)
      if (rng.uniform01() < params.rho) row[j] = rng.uniform(-a, a);
  }
  for (const int j : inst.outlier_indices)
    for (int i = 0; i < n1; ++i) inst.s(i, j) = 0.0;

  // C: magnitude matched to the RMS column norm of L over inlier columns
  double magnitude = params.outlier_scale;
  if (k_out < n2) {
    double sq = 0.0;
    for (int i = 0; i < n1; ++i) {
      const double* row = inst.l.row_ptr(i);
      for (int j = 0; j < n2; ++j)
        if (!is_outlier[static_cast<std::size_t>(j)]) sq += row[j] * row[j];
    }
    magnitude *= std::sqrt(sq / static_cast<double>(n2 - k_out));
  }
  inst.c = DenseMatrix(n1, n2);
  for (const int j : inst.outlier_indices) {
    const std::vector<double> dir = sample_unit_sphere(n1, rng);
    for (int i = 0; i < n1; ++i) inst.c(i, j) = magnitude * dir[static_cast<std::size_t>(i)];
  }

  // D as the exact sum, then re-derive S so that d - l - s - c vanishes
  // exactly in floating point (left-to-right evaluation).
  inst.d = DenseMatrix(n1, n2);
  for (std::size_t i = 0; i < inst.d.size(); ++i)
    inst.d.data()[i] = (inst.l.data()[i] + inst.s.data()[i]) + inst.c.data()[i];
  for (std::size_t i = 0; i < inst.s.size(); ++i)
    inst.s.data()[i] = (inst.d.data()[i] - inst.l.data()[i]) - inst.c.data()[i];
  return inst;
}

void write_instance(const Instance& inst, const std::string& dir) {
  fs::create_directories(dir);
  write_csv_matrix(inst.d, (fs::path(dir) / "D.csv").string());
  write_csv_matrix(inst.l, (fs::path(dir) / "L.csv").string());
  write_csv_matrix(inst.s, (fs::path(dir) / "S.csv").string());
  write_csv_matrix(inst.c, (fs::path(dir) / "C.csv").string());
  json meta;
  meta["n1"] = inst.params.n1;
  meta["n2"] = inst.params.n2;
  meta["rank_r"] = inst.params.rank_r;
  meta["rho"] = inst.params.rho;
  meta["num_outliers_k"] = inst.params.num_outliers_k;
  meta["sparse_amplitude"] = inst.params.sparse_amplitude;
  meta["num_clusters"] = inst.params.num_clusters;
  meta["seed"] = inst.params.seed;
  meta["leading_outliers"] = inst.params.leading_outliers;
  meta["outlier_scale"] = inst.params.outlier_scale;
  meta["outlier_indices"] = inst.outlier_indices;
  std::ofstream out(fs::path(dir) / "meta.json");
  if (!out) throw InvalidInputError("cannot write meta.json in " + dir);
  out << meta.dump(2) << "\n";
}

Instance load_instance(const std::string& dir) {
  const fs::path base(dir);
  Instance inst;
  inst.d = read_csv_matrix((base / "D.csv").string());
  inst.l = read_csv_matrix((base / "L.csv").string());
  inst.s = read_csv_matrix((base / "S.csv").string());
  inst.c = read_csv_matrix((base / "C.csv").string());
  std::ifstream in(base / "meta.json");
  if (!in) throw InvalidInputError("missing meta.json in " + dir);
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw InvalidInputError("malformed meta.json in " + dir + ": " + e.what());
  }
  ModelParams& p = inst.params;
  try {
    p.n1 = meta.at("n1").get<int>();
    p.n2 = meta.at("n2").get<int>();
    p.rank_r = meta.at("rank_r").get<int>();
    p.rho = meta.at("rho").get<double>();
    p.num_outliers_k = meta.at("num_outliers_k").get<int>();
    p.sparse_amplitude = meta.at("sparse_amplitude").get<double>();
    p.num_clusters = meta.at("num_clusters").get<int>();
    p.seed = meta.at("seed").get<std::uint64_t>();
    p.leading_outliers = meta.value("leading_outliers", false);
    p.outlier_scale = meta.value("outlier_scale", 1.0);
    inst.outlier_indices = meta.at("outlier_indices").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw InvalidInputError("meta.json in " + dir + " missing fields: " + e.what());
  }
  if (inst.d.rows() != p.n1 || inst.d.cols() != p.n2)
    throw InvalidInputError("instance dir " + dir + ": matrix shape disagrees with meta");
  return inst;
}

}  // namespace lsc
