#pragma once

// Data-parallel inner loops of the solver.
//
// Every kernel has a scalar reference implementation. Vector variants
// (AVX2 on x86-64, NEON on AArch64) are selected at runtime from what the
// CPU reports. Elementwise kernels are bit-identical across variants.
// Reductions use compensated summation in every variant: per-lane Kahan
// accumulators, folded in fixed lane order, so a given variant is
// bit-reproducible run to run, and variants agree to a few ulps of the
// absolute sum.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace coagfrag::simd {

enum class Level { kScalar, kAvx2, kNeon };

std::string_view level_name(Level level);
Level parse_level(std::string_view name);  // "scalar" | "avx2" | "neon" | "auto"

struct KernelTable {
  Level level;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // sum_i w[i] * |a[i]|
  double (*weighted_abs_sum)(const double* w, const double* a, std::size_t n);
  // sum_i w[i] * |a[i] - b[i]|
  double (*weighted_abs_diff)(const double* w, const double* a, const double* b,
                              std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = y[i] + h * (c1*k1[i] + c2*k2[i])
  void (*lincomb2)(const double* y, double h, double c1, const double* k1,
                   double c2, const double* k2, double* out, std::size_t n);
  // out[i] = y[i] + h * ((c1*k1[i] + c2*k2[i]) + c3*k3[i])
  void (*lincomb3)(const double* y, double h, double c1, const double* k1,
                   double c2, const double* k2, double c3, const double* k3,
                   double* out, std::size_t n);
  // out[i] = h * (((c1*k1[i] + c2*k2[i]) + c3*k3[i]) + c4*k4[i])
  void (*lincomb4)(double h, double c1, const double* k1, double c2,
                   const double* k2, double c3, const double* k3, double c4,
                   const double* k4, double* out, std::size_t n);
  // min and max over a[0..n); n > 0
  void (*minmax)(const double* a, std::size_t n, double* lo, double* hi);
};

/// Levels compiled into this binary and supported by the running CPU.
/// Always contains kScalar first.
std::vector<Level> available_levels();
Level best_level();
bool is_available(Level level);

/// Table for a specific level; throws std::invalid_argument if unavailable.
const KernelTable& table(Level level);

/// Process-wide active table. Defaults to best_level(). Selection is meant
/// to happen once at startup, before any solver work.
const KernelTable& active();
void select(Level level);

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double weighted_abs_sum(std::span<const double> w, std::span<const double> a);
double weighted_abs_diff(std::span<const double> w, std::span<const double> a,
                         std::span<const double> b);

namespace detail {
const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace coagfrag::simd
