#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "coagfrag/simd/kernels.hpp"
#include "kahan.hpp"

// AdvSIMD is baseline on AArch64, so no target attributes are needed.
// Two float64 lanes per register; reductions fold lanes 0 then 1.

namespace coagfrag::simd::detail {
namespace {

constexpr std::size_t kLanes = 2;

struct LaneKahan {
  float64x2_t s = vdupq_n_f64(0.0);
  float64x2_t c = vdupq_n_f64(0.0);
};

inline void lane_add(LaneKahan& acc, float64x2_t x) {
  const float64x2_t y = vsubq_f64(x, acc.c);
  const float64x2_t t = vaddq_f64(acc.s, y);
  acc.c = vsubq_f64(vsubq_f64(t, acc.s), y);
  acc.s = t;
}

inline Kahan lane_fold(const LaneKahan& acc) {
  Kahan out;
  out.merge(vgetq_lane_f64(acc.s, 0), vgetq_lane_f64(acc.c, 0));
  out.merge(vgetq_lane_f64(acc.s, 1), vgetq_lane_f64(acc.c, 1));
  return out;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  LaneKahan acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) lane_add(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(a[i] * b[i]);
  return out.value();
}

double sum_neon(const double* a, std::size_t n) {
  LaneKahan acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) lane_add(acc, vld1q_f64(a + i));
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(a[i]);
  return out.value();
}

double weighted_abs_sum_neon(const double* w, const double* a, std::size_t n) {
  LaneKahan acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lane_add(acc, vmulq_f64(vld1q_f64(w + i), vabsq_f64(vld1q_f64(a + i))));
  }
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(w[i] * std::fabs(a[i]));
  return out.value();
}

double weighted_abs_diff_neon(const double* w, const double* a, const double* b,
                              std::size_t n) {
  LaneKahan acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    lane_add(acc, vmulq_f64(vld1q_f64(w + i), vabsq_f64(d)));
  }
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(w[i] * std::fabs(a[i] - b[i]));
  return out.value();
}

void mul_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

// vmulq/vaddq only (never vfmaq) so results match the scalar path bit for bit.
void lincomb2_neon(const double* y, double h, double c1, const double* k1,
                   double c2, const double* k2, double* out, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h);
  const float64x2_t v1 = vdupq_n_f64(c1);
  const float64x2_t v2 = vdupq_n_f64(c2);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t t = vaddq_f64(vmulq_f64(v1, vld1q_f64(k1 + i)), vmulq_f64(v2, vld1q_f64(k2 + i)));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vh, t)));
  }
  for (; i < n; ++i) out[i] = y[i] + h * (c1 * k1[i] + c2 * k2[i]);
}

void lincomb3_neon(const double* y, double h, double c1, const double* k1,
                   double c2, const double* k2, double c3, const double* k3,
                   double* out, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h);
  const float64x2_t v1 = vdupq_n_f64(c1);
  const float64x2_t v2 = vdupq_n_f64(c2);
  const float64x2_t v3 = vdupq_n_f64(c3);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    float64x2_t t = vaddq_f64(vmulq_f64(v1, vld1q_f64(k1 + i)), vmulq_f64(v2, vld1q_f64(k2 + i)));
    t = vaddq_f64(t, vmulq_f64(v3, vld1q_f64(k3 + i)));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vh, t)));
  }
  for (; i < n; ++i) out[i] = y[i] + h * ((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]);
}

void lincomb4_neon(double h, double c1, const double* k1, double c2,
                   const double* k2, double c3, const double* k3, double c4,
                   const double* k4, double* out, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h);
  const float64x2_t v1 = vdupq_n_f64(c1);
  const float64x2_t v2 = vdupq_n_f64(c2);
  const float64x2_t v3 = vdupq_n_f64(c3);
  const float64x2_t v4 = vdupq_n_f64(c4);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    float64x2_t t = vaddq_f64(vmulq_f64(v1, vld1q_f64(k1 + i)), vmulq_f64(v2, vld1q_f64(k2 + i)));
    t = vaddq_f64(t, vmulq_f64(v3, vld1q_f64(k3 + i)));
    t = vaddq_f64(t, vmulq_f64(v4, vld1q_f64(k4 + i)));
    vst1q_f64(out + i, vmulq_f64(vh, t));
  }
  for (; i < n; ++i) out[i] = h * (((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]) + c4 * k4[i]);
}

void minmax_neon(const double* a, std::size_t n, double* lo, double* hi) {
  double l = a[0];
  double u = a[0];
  std::size_t i = 0;
  if (n >= kLanes) {
    float64x2_t vl = vld1q_f64(a);
    float64x2_t vu = vl;
    for (i = kLanes; i + kLanes <= n; i += kLanes) {
      const float64x2_t x = vld1q_f64(a + i);
      vl = vminq_f64(vl, x);
      vu = vmaxq_f64(vu, x);
    }
    l = vminvq_f64(vl);
    u = vmaxvq_f64(vu);
  }
  for (; i < n; ++i) {
    l = a[i] < l ? a[i] : l;
    u = a[i] > u ? a[i] : u;
  }
  *lo = l;
  *hi = u;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{
      Level::kNeon,      dot_neon,      sum_neon,      weighted_abs_sum_neon,
      weighted_abs_diff_neon, mul_neon, lincomb2_neon, lincomb3_neon,
      lincomb4_neon,     minmax_neon,
  };
  return table;
}

}  // namespace coagfrag::simd::detail

#endif
