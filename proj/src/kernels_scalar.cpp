#include <cmath>

#include "lsc/kernels.hpp"

namespace lsc::kern {
namespace {

double dot_ref(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_ref(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void rot_ref(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = c * x[i] - s * y[i];
    const double yi = s * x[i] + c * y[i];
    x[i] = xi;
    y[i] = yi;
  }
}

void shrink_ref(const double* x, double tau, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::fabs(x[i]) - tau;
    out[i] = m > 0.0 ? std::copysign(m, x[i]) : 0.0;
  }
}

double asum_ref(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double sqsum_ref(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double amax_ref(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table{"scalar",  dot_ref,   axpy_ref,  scal_ref,
                         rot_ref,   shrink_ref, asum_ref, sqsum_ref,
                         amax_ref};
  return table;
}

}  // namespace lsc::kern
