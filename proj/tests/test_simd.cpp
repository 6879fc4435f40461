#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "coagfrag/simd/kernels.hpp"

using namespace coagfrag::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint32_t seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// odd lengths hit the tail loops
const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 13, 64, 255, 1000};

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
  auto levels = available_levels();
  ASSERT_FALSE(levels.empty());
  EXPECT_EQ(levels.front(), Level::kScalar);
  EXPECT_TRUE(is_available(best_level()));
}

TEST(Simd, ParseLevel) {
  EXPECT_EQ(parse_level("scalar"), Level::kScalar);
  EXPECT_EQ(parse_level("avx2"), Level::kAvx2);
  EXPECT_EQ(parse_level("auto"), best_level());
  EXPECT_ANY_THROW(parse_level("sse9"));
}

TEST(Simd, ElementwiseBitIdentical) {
  const auto& ref = table(Level::kScalar);
  for (Level lv : available_levels()) {
    const auto& k = table(lv);
    for (std::size_t n : kSizes) {
      auto y = random_vec(n, 1), a = random_vec(n, 2), b = random_vec(n, 3), c = random_vec(n, 4),
           d = random_vec(n, 5);
      std::vector<double> o1(n), o2(n);

      ref.mul(a.data(), b.data(), o1.data(), n);
      k.mul(a.data(), b.data(), o2.data(), n);
      EXPECT_EQ(o1, o2) << level_name(lv) << " mul n=" << n;

      ref.lincomb2(y.data(), 0.37, 0.5, a.data(), -1.25, b.data(), o1.data(), n);
      k.lincomb2(y.data(), 0.37, 0.5, a.data(), -1.25, b.data(), o2.data(), n);
      EXPECT_EQ(o1, o2) << level_name(lv) << " lincomb2 n=" << n;

      ref.lincomb3(y.data(), 0.1, 2.0 / 9, a.data(), 1.0 / 3, b.data(), 4.0 / 9, c.data(),
                   o1.data(), n);
      k.lincomb3(y.data(), 0.1, 2.0 / 9, a.data(), 1.0 / 3, b.data(), 4.0 / 9, c.data(),
                 o2.data(), n);
      EXPECT_EQ(o1, o2) << level_name(lv) << " lincomb3 n=" << n;

      ref.lincomb4(0.3, -0.07, a.data(), 0.08, b.data(), 0.11, c.data(), -0.125, d.data(),
                   o1.data(), n);
      k.lincomb4(0.3, -0.07, a.data(), 0.08, b.data(), 0.11, c.data(), -0.125, d.data(),
                 o2.data(), n);
      EXPECT_EQ(o1, o2) << level_name(lv) << " lincomb4 n=" << n;

      if (n > 0) {
        double lo1, hi1, lo2, hi2;
        ref.minmax(a.data(), n, &lo1, &hi1);
        k.minmax(a.data(), n, &lo2, &hi2);
        EXPECT_EQ(lo1, lo2);
        EXPECT_EQ(hi1, hi2);
      }
    }
  }
}

TEST(Simd, ReductionsAgreeAcrossLevels) {
  const auto& ref = table(Level::kScalar);
  for (Level lv : available_levels()) {
    const auto& k = table(lv);
    for (std::size_t n : kSizes) {
      auto a = random_vec(n, 11), b = random_vec(n, 12), w = random_vec(n, 13, 0, 5);
      double abs_scale = 0;
      for (std::size_t i = 0; i < n; ++i) abs_scale += std::abs(a[i] * b[i]) + w[i] * std::abs(a[i]);
      const double tol = 8 * 2.2e-16 * (abs_scale + 1e-300);
      EXPECT_NEAR(ref.dot(a.data(), b.data(), n), k.dot(a.data(), b.data(), n), tol);
      EXPECT_NEAR(ref.sum(a.data(), n), k.sum(a.data(), n), tol);
      EXPECT_NEAR(ref.weighted_abs_sum(w.data(), a.data(), n),
                  k.weighted_abs_sum(w.data(), a.data(), n), tol);
      EXPECT_NEAR(ref.weighted_abs_diff(w.data(), a.data(), b.data(), n),
                  k.weighted_abs_diff(w.data(), a.data(), b.data(), n), 2 * tol + 1e-300);
    }
  }
}

TEST(Simd, ReductionsRepeatable) {
  auto a = random_vec(4097, 21), b = random_vec(4097, 22);
  for (Level lv : available_levels()) {
    const auto& k = table(lv);
    const double d1 = k.dot(a.data(), b.data(), a.size());
    const double d2 = k.dot(a.data(), b.data(), a.size());
    EXPECT_EQ(d1, d2);
  }
}

TEST(Simd, CompensatedSumBeatsNaive) {
  // 1 + many tiny terms: naive summation loses all of them
  std::vector<double> v(10001, 1e-16);
  v[0] = 1.0;
  for (Level lv : available_levels()) {
    EXPECT_NEAR(table(lv).sum(v.data(), v.size()), 1.0 + 1e-12, 1e-15) << level_name(lv);
  }
}

TEST(Simd, SpanHelpers) {
  std::vector<double> a{1, 2, 3}, b{4, 5, 6}, w{1, 1, 2};
  EXPECT_DOUBLE_EQ(dot(a, b), 32.0);
  EXPECT_DOUBLE_EQ(sum(a), 6.0);
  EXPECT_DOUBLE_EQ(weighted_abs_sum(w, b), 21.0);
  EXPECT_DOUBLE_EQ(weighted_abs_diff(w, a, b), 12.0);
}
