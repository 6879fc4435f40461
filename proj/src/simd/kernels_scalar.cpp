#include <cmath>

#include "coagfrag/simd/kernels.hpp"
#include "kahan.hpp"

namespace coagfrag::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  Kahan acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

double sum_scalar(const double* a, std::size_t n) {
  Kahan acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(a[i]);
  return acc.value();
}

double weighted_abs_sum_scalar(const double* w, const double* a, std::size_t n) {
  Kahan acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(w[i] * std::fabs(a[i]));
  return acc.value();
}

double weighted_abs_diff_scalar(const double* w, const double* a, const double* b,
                                std::size_t n) {
  Kahan acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(w[i] * std::fabs(a[i] - b[i]));
  return acc.value();
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void lincomb2_scalar(const double* y, double h, double c1, const double* k1,
                     double c2, const double* k2, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + h * (c1 * k1[i] + c2 * k2[i]);
}

void lincomb3_scalar(const double* y, double h, double c1, const double* k1,
                     double c2, const double* k2, double c3, const double* k3,
                     double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + h * ((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]);
  }
}

void lincomb4_scalar(double h, double c1, const double* k1, double c2,
                     const double* k2, double c3, const double* k3, double c4,
                     const double* k4, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = h * (((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]) + c4 * k4[i]);
  }
}

void minmax_scalar(const double* a, std::size_t n, double* lo, double* hi) {
  double l = a[0];
  double u = a[0];
  for (std::size_t i = 1; i < n; ++i) {
    l = a[i] < l ? a[i] : l;
    u = a[i] > u ? a[i] : u;
  }
  *lo = l;
  *hi = u;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Level::kScalar,      dot_scalar,      sum_scalar,      weighted_abs_sum_scalar,
      weighted_abs_diff_scalar, mul_scalar, lincomb2_scalar, lincomb3_scalar,
      lincomb4_scalar,     minmax_scalar,
  };
  return table;
}

}  // namespace coagfrag::simd::detail
