#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "coagfrag/simd/kernels.hpp"
#include "kahan.hpp"

// Compiled without global -mavx2; each function opts in through the target
// attribute so the binary still runs on CPUs without AVX2 (dispatch guards
// the calls).
#define COAGFRAG_AVX2 __attribute__((target("avx2")))

namespace coagfrag::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

struct LaneKahan {
  __m256d s;
  __m256d c;
};

COAGFRAG_AVX2 inline LaneKahan lane_zero() {
  return {_mm256_setzero_pd(), _mm256_setzero_pd()};
}

COAGFRAG_AVX2 inline void lane_add(LaneKahan& acc, __m256d x) {
  const __m256d y = _mm256_sub_pd(x, acc.c);
  const __m256d t = _mm256_add_pd(acc.s, y);
  acc.c = _mm256_sub_pd(_mm256_sub_pd(t, acc.s), y);
  acc.s = t;
}

COAGFRAG_AVX2 inline Kahan lane_fold(const LaneKahan& acc) {
  alignas(32) double s[kLanes];
  alignas(32) double c[kLanes];
  _mm256_store_pd(s, acc.s);
  _mm256_store_pd(c, acc.c);
  Kahan out;
  for (std::size_t l = 0; l < kLanes; ++l) out.merge(s[l], c[l]);
  return out;
}

COAGFRAG_AVX2 inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

COAGFRAG_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  LaneKahan acc = lane_zero();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lane_add(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(a[i] * b[i]);
  return out.value();
}

COAGFRAG_AVX2 double sum_avx2(const double* a, std::size_t n) {
  LaneKahan acc = lane_zero();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) lane_add(acc, _mm256_loadu_pd(a + i));
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(a[i]);
  return out.value();
}

COAGFRAG_AVX2 double weighted_abs_sum_avx2(const double* w, const double* a,
                                           std::size_t n) {
  LaneKahan acc = lane_zero();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lane_add(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), abs_pd(_mm256_loadu_pd(a + i))));
  }
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(w[i] * std::fabs(a[i]));
  return out.value();
}

COAGFRAG_AVX2 double weighted_abs_diff_avx2(const double* w, const double* a,
                                            const double* b, std::size_t n) {
  LaneKahan acc = lane_zero();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    lane_add(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), abs_pd(d)));
  }
  Kahan out = lane_fold(acc);
  for (; i < n; ++i) out.add(w[i] * std::fabs(a[i] - b[i]));
  return out.value();
}

COAGFRAG_AVX2 void mul_avx2(const double* a, const double* b, double* out,
                            std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

COAGFRAG_AVX2 void lincomb2_avx2(const double* y, double h, double c1,
                                 const double* k1, double c2, const double* k2,
                                 double* out, std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(v1, _mm256_loadu_pd(k1 + i)),
                                    _mm256_mul_pd(v2, _mm256_loadu_pd(k2 + i)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vh, t)));
  }
  for (; i < n; ++i) out[i] = y[i] + h * (c1 * k1[i] + c2 * k2[i]);
}

COAGFRAG_AVX2 void lincomb3_avx2(const double* y, double h, double c1,
                                 const double* k1, double c2, const double* k2,
                                 double c3, const double* k3, double* out,
                                 std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  const __m256d v3 = _mm256_set1_pd(c3);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d t = _mm256_add_pd(_mm256_mul_pd(v1, _mm256_loadu_pd(k1 + i)),
                              _mm256_mul_pd(v2, _mm256_loadu_pd(k2 + i)));
    t = _mm256_add_pd(t, _mm256_mul_pd(v3, _mm256_loadu_pd(k3 + i)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vh, t)));
  }
  for (; i < n; ++i) out[i] = y[i] + h * ((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]);
}

COAGFRAG_AVX2 void lincomb4_avx2(double h, double c1, const double* k1, double c2,
                                 const double* k2, double c3, const double* k3,
                                 double c4, const double* k4, double* out,
                                 std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  const __m256d v3 = _mm256_set1_pd(c3);
  const __m256d v4 = _mm256_set1_pd(c4);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d t = _mm256_add_pd(_mm256_mul_pd(v1, _mm256_loadu_pd(k1 + i)),
                              _mm256_mul_pd(v2, _mm256_loadu_pd(k2 + i)));
    t = _mm256_add_pd(t, _mm256_mul_pd(v3, _mm256_loadu_pd(k3 + i)));
    t = _mm256_add_pd(t, _mm256_mul_pd(v4, _mm256_loadu_pd(k4 + i)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vh, t));
  }
  for (; i < n; ++i) {
    out[i] = h * (((c1 * k1[i] + c2 * k2[i]) + c3 * k3[i]) + c4 * k4[i]);
  }
}

COAGFRAG_AVX2 void minmax_avx2(const double* a, std::size_t n, double* lo,
                               double* hi) {
  double l = a[0];
  double u = a[0];
  std::size_t i = 0;
  if (n >= kLanes) {
    __m256d vl = _mm256_loadu_pd(a);
    __m256d vu = vl;
    for (i = kLanes; i + kLanes <= n; i += kLanes) {
      const __m256d x = _mm256_loadu_pd(a + i);
      vl = _mm256_min_pd(vl, x);
      vu = _mm256_max_pd(vu, x);
    }
    alignas(32) double bl[kLanes];
    alignas(32) double bu[kLanes];
    _mm256_store_pd(bl, vl);
    _mm256_store_pd(bu, vu);
    for (std::size_t k = 0; k < kLanes; ++k) {
      l = bl[k] < l ? bl[k] : l;
      u = bu[k] > u ? bu[k] : u;
    }
  }
  for (; i < n; ++i) {
    l = a[i] < l ? a[i] : l;
    u = a[i] > u ? a[i] : u;
  }
  *lo = l;
  *hi = u;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      Level::kAvx2,      dot_avx2,      sum_avx2,      weighted_abs_sum_avx2,
      weighted_abs_diff_avx2, mul_avx2, lincomb2_avx2, lincomb3_avx2,
      lincomb4_avx2,     minmax_avx2,
  };
  return table;
}

}  // namespace coagfrag::simd::detail

#endif
