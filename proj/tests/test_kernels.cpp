#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "coagfrag/errors.hpp"
#include "coagfrag/kernels.hpp"

using namespace coagfrag;

TEST(Kernels, PresetValues) {
  EXPECT_NEAR(CoagulationKernel::shear(1.0)(1.0, 1.0), 5.0396842, 1e-7);
  EXPECT_DOUBLE_EQ(CoagulationKernel::shear(1.0)(1.0, 1.0), std::pow(2.0, 7.0 / 3.0));
  EXPECT_DOUBLE_EQ(CoagulationKernel::modified_smoluchowski(1.0, 1.0)(1.0, 1.0), 2.0);
  auto k = CoagulationKernel::constant(1.0);
  EXPECT_EQ(k(1e-6, 1e6), 1.0);
  EXPECT_EQ(k(3.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(CoagulationKernel::product_power(1.0, 1.0, 1.0)(3.0, 4.0), 12.0);
}

TEST(Kernels, DomainErrors) {
  auto k = CoagulationKernel::constant(1.0);
  EXPECT_THROW(k(0.0, 1.0), DomainError);
  EXPECT_THROW(k(-1.0, 1.0), DomainError);
  EXPECT_THROW(CoagulationKernel::product_power(1.0, 1.0, 1.0)(1e200, 1e200), EvaluationError);
  EXPECT_THROW(CoagulationKernel::constant(-1.0), ConfigError);
}

TEST(Kernels, SymmetryOnRandomPairs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(std::log(1e-6), std::log(1e6));
  const CoagulationKernel ks[] = {
      CoagulationKernel::constant(2.0), CoagulationKernel::shear(1.0),
      CoagulationKernel::modified_smoluchowski(1.0, 0.5), CoagulationKernel::sum_power(1.0, 0.3, 0.6),
      CoagulationKernel::product_power(1.0, 0.4, 0.4),
      CoagulationKernel::custom_table({1e-6, 1.0, 1e6}, {1, 2, 3, 2, 4, 5, 3, 5, 6})};
  for (const auto& k : ks) {
    for (int n = 0; n < 10000; ++n) {
      const double x = std::exp(u(rng)), y = std::exp(u(rng));
      const double a = k(x, y);
      EXPECT_LE(std::abs(a - k(y, x)), 1e-12 * (1 + a));
    }
  }
}

TEST(Kernels, CustomTableNeedsSymmetry) {
  EXPECT_THROW(CoagulationKernel::custom_table({1, 2}, {1, 2, 3, 4}), ConfigError);
}

TEST(Fragmentation, RateExamples) {
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(0.5, 0.0).rate(4.0), 2.0);
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(1.0, 0.0).rate(3.0), 3.0);
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(0.0, 0.0, 7.0).rate(123.4), 7.0);
  EXPECT_THROW(FragmentationSpec::power_law(-0.5, 0.0).rate(0.0), DomainError);
  EXPECT_THROW(FragmentationSpec::power_law(1.0, 0.0).rate(-1.0), DomainError);
}

TEST(Fragmentation, BreakageExamples) {
  auto binary = FragmentationSpec::power_law(1.0, 0.0);
  EXPECT_DOUBLE_EQ(binary.breakage(2.0, 1.0), 1.0);
  EXPECT_EQ(binary.breakage(2.0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(1.0, -0.5).breakage(1.0, 0.25), 3.0);
  EXPECT_THROW(FragmentationSpec::power_law(1.0, -1.0), ConfigError);
  EXPECT_THROW(FragmentationSpec::power_law(1.0, -1.5), ConfigError);
}

TEST(Fragmentation, SupportIsExact) {
  for (double alpha : {-0.9, -0.5, 0.0, 2.0}) {
    auto f = FragmentationSpec::power_law(1.0, alpha);
    for (double y : {1e-3, 1.0, 7.5, 1e4}) {
      EXPECT_EQ(f.breakage(y, y), 0.0);
      EXPECT_EQ(f.breakage(y, 1.5 * y), 0.0);
      EXPECT_EQ(f.breakage(y, 1e9), 0.0);
    }
  }
}

TEST(Fragmentation, FragmentCount) {
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(1, 0.0).fragment_count(), 2.0);
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(1, -0.5).fragment_count(), 3.0);
  EXPECT_DOUBLE_EQ(FragmentationSpec::power_law(1, 2.0).fragment_count(), 4.0 / 3.0);
}

TEST(Fragmentation, FragmentCountByQuadrature) {
  // tanh-sinh copes with the x^alpha endpoint singularity
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double alpha : {-0.9, -0.5, 0.0}) {
    auto f = FragmentationSpec::power_law(1.0, alpha);
    for (double y : {0.01, 1.0, 50.0}) {
      const double n = ts.integrate([&](double x) { return f.breakage(y, x); }, 0.0, y);
      EXPECT_NEAR(n / f.fragment_count(), 1.0, 1e-8) << "alpha=" << alpha << " y=" << y;
    }
  }
}

TEST(Fragmentation, PartialMassExamples) {
  auto f = FragmentationSpec::power_law(1.0, 0.0);
  EXPECT_DOUBLE_EQ(f.partial_mass(2.0, 0.0, 2.0), 2.0);
  EXPECT_EQ(f.partial_mass(2.0, 0.7, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(f.partial_mass(2.0, 0.0, 1.0), 0.5);
  EXPECT_THROW(f.partial_mass(2.0, 0.0, 3.0), DomainError);
  EXPECT_THROW(f.partial_mass(2.0, -1.0, 1.0), DomainError);
}

TEST(Fragmentation, MassNormalization) {
  for (double alpha : {-0.9, -0.5, 0.0}) {
    auto f = FragmentationSpec::power_law(1.0, alpha);
    for (int k = 0; k < 100; ++k) {
      const double y = std::pow(10.0, -6.0 + 12.0 * k / 99.0);
      EXPECT_LE(std::abs(f.partial_mass(y, 0.0, y) - y), 1e-12 * y);
    }
  }
}

TEST(Fragmentation, PartialNumberMatchesQuadrature) {
  auto f = FragmentationSpec::power_law(1.0, -0.5);
  const double exact = f.partial_number(4.0, 1.0, 3.0);
  const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double x) { return f.breakage(4.0, x); }, 1.0, 3.0);
  EXPECT_NEAR(exact, q, 1e-12);
}

TEST(Fragmentation, CustomRateInterpolatesInLog) {
  FragmentationParams p;
  p.family = RateFamily::kCustom;
  p.rate_sizes = {1.0, 100.0};
  p.rate_values = {1.0, 3.0};
  FragmentationSpec f(p);
  EXPECT_DOUBLE_EQ(f.rate(10.0), 2.0);
  EXPECT_DOUBLE_EQ(f.rate(1e-3), 1.0);  // clamped
  EXPECT_DOUBLE_EQ(f.rate(1e5), 3.0);
}

TEST(Kernels, FamilyNames) {
  for (auto fam : {KernelFamily::kConstant, KernelFamily::kShear, KernelFamily::kModifiedSmoluchowski,
                   KernelFamily::kSumPower, KernelFamily::kProductPower, KernelFamily::kCustomTable}) {
    EXPECT_EQ(parse_kernel_family(to_string(fam)), fam);
  }
  EXPECT_THROW(parse_kernel_family("brownian"), ConfigError);
}
