#include "lsc/dense_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lsc {

namespace {

void check_dims(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw InvalidInputError("DenseMatrix: dimensions must be positive, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
}

void check_index(int v, int bound, const char* what) {
  if (v < 0 || v >= bound)
    throw InvalidInputError(std::string("DenseMatrix: ") + what + " index " +
                            std::to_string(v) + " out of range [0, " +
                            std::to_string(bound) + ")");
}

}  // namespace

DenseMatrix::DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  check_dims(rows, cols);
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InvalidInputError("DenseMatrix: entries length does not match dimensions");
  if (!all_finite())
    throw InvalidInputError("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (const double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void DenseMatrix::fill(double v) {
  for (auto& e : data_) e = v;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> DenseMatrix::col_copy(int j) const {
  check_index(j, cols_, "column");
  std::vector<double> c(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i) c[static_cast<std::size_t>(i)] = (*this)(i, j);
  return c;
}

void DenseMatrix::set_col(int j, const double* v) {
  check_index(j, cols_, "column");
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::columns(const std::vector<int>& idx) const {
  if (idx.empty()) throw InvalidInputError("DenseMatrix::columns: empty selection");
  for (const int j : idx) check_index(j, cols_, "column");
  DenseMatrix out(rows_, static_cast<int>(idx.size()));
  for (int i = 0; i < rows_; ++i) {
    const double* src = row_ptr(i);
    double* dst = out.row_ptr(i);
    for (std::size_t k = 0; k < idx.size(); ++k) dst[k] = src[idx[k]];
  }
  return out;
}

DenseMatrix DenseMatrix::without_column(int j) const {
  check_index(j, cols_, "column");
  if (cols_ < 2)
    throw InvalidInputError("DenseMatrix::without_column: matrix has a single column");
  DenseMatrix out(rows_, cols_ - 1);
  for (int i = 0; i < rows_; ++i) {
    const double* src = row_ptr(i);
    double* dst = out.row_ptr(i);
    for (int k = 0; k < j; ++k) dst[k] = src[k];
    for (int k = j + 1; k < cols_; ++k) dst[k - 1] = src[k];
  }
  return out;
}

DenseMatrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open matrix file: " + path);
  std::vector<double> entries;
  int cols = -1;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int this_cols = 0;
    const char* p = line.c_str();
    for (;;) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p)
        throw InvalidInputError("malformed matrix file " + path + " at row " +
                                std::to_string(rows));
      entries.push_back(v);
      ++this_cols;
      while (*end == ' ' || *end == '\t') ++end;
      if (*end == '\0') break;
      if (*end != ',')
        throw InvalidInputError("malformed matrix file " + path + " at row " +
                                std::to_string(rows));
      p = end + 1;
    }
    if (cols == -1) cols = this_cols;
    if (this_cols != cols)
      throw InvalidInputError("ragged rows in matrix file " + path);
    ++rows;
  }
  if (rows == 0) throw InvalidInputError("empty matrix file: " + path);
  return DenseMatrix(rows, cols, std::move(entries));
}

void write_csv_matrix(const DenseMatrix& m, const std::string& path) {
  if (m.empty()) throw InvalidInputError("write_csv_matrix: empty matrix");
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open file for writing: " + path);
  char buf[40];
  std::string line;
  for (int i = 0; i < m.rows(); ++i) {
    line.clear();
    const double* row = m.row_ptr(i);
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      if (j > 0) line += ',';
      line += buf;
    }
    line += '\n';
    out << line;
  }
  if (!out) throw InvalidInputError("write failed: " + path);
}

}  // namespace lsc
