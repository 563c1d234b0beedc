#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lsc/errors.hpp"

namespace lsc {

// Dense row-major matrix of doubles. Checked constructors require strictly
// positive dimensions; a default-constructed matrix is an empty placeholder
// (0x0) used only as "not yet assigned" inside result structs.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(int rows, int cols);  // zero-filled
  DenseMatrix(int rows, int cols, std::vector<double> entries);

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(j)];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(j)];
  }

  double* row_ptr(int i) {
    return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_);
  }
  const double* row_ptr(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_);
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;
  void fill(double v);

  DenseMatrix transposed() const;

  std::vector<double> col_copy(int j) const;
  void set_col(int j, const double* v);

  // Gather the given columns, in the given order.
  DenseMatrix columns(const std::vector<int>& idx) const;
  DenseMatrix without_column(int j) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Repo-wide matrix file format: plain CSV, no header, one matrix row per
// line, comma separator, >= 15 significant digits (written with %.17g, which
// round-trips doubles exactly).
DenseMatrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const DenseMatrix& m, const std::string& path);

}  // namespace lsc
