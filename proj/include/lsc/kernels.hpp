#pragma once

#include <cstddef>

// Vector kernels on contiguous doubles. A scalar reference table and an
// AVX2+FMA table implement the same signatures; dispatch picks one at runtime
// from CPU features. Tests pin the scalar table to compare the two.
namespace lsc::kern {

struct Ops {
  const char* name;
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scal)(double a, double* x, std::size_t n);
  // plane rotation: x <- c*x - s*y, y <- s*x + c*y
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  // soft threshold: out[i] = sign(x[i]) * max(|x[i]| - tau, 0)
  void (*shrink)(const double* x, double tau, double* out, std::size_t n);
  // sum_i |x[i]|
  double (*asum)(const double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sqsum)(const double* x, std::size_t n);
  // max_i |x[i]|  (0 for n == 0)
  double (*amax)(const double* x, std::size_t n);
};

const Ops& scalar_ops();

// nullptr when the binary was built without AVX2 support or the CPU lacks
// AVX2/FMA.
const Ops* avx2_ops();

// The table used by the library; AVX2 when available unless pinned.
const Ops& active();

// Pin dispatch to the scalar table (on = true). Returns the previous setting.
bool force_scalar(bool on);

namespace detail {
const Ops* avx2_table();  // compiled-in table or nullptr
}

}  // namespace lsc::kern
