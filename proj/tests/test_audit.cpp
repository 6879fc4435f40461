#include <gtest/gtest.h>

#include <cmath>

#include "coagfrag/audit.hpp"
#include "coagfrag/errors.hpp"

using namespace coagfrag;

namespace {

SamplePlan small_plan() {
  SamplePlan p;
  p.points = 1024;
  p.inner = 32;
  return p;
}

HypothesisConstants worked_example(double gamma, double alpha, double mu) {
  HypothesisConstants c;
  c.k1 = 1.0;
  c.mu = mu;
  c.m = 1.0;
  c.lambda = 1.0 - gamma;
  c.L_gamma = alpha + 2.0;
  c.nu = gamma - 1.0;
  return c;
}

void expect_witnesses_sound(const AuditReport& r, const std::optional<CoagulationKernel>& k,
                            const std::optional<FragmentationSpec>& f) {
  for (const auto& w : r.witnesses) {
    switch (w.hypothesis) {
      case Hypothesis::kA2:
        ASSERT_TRUE(k);
        EXPECT_EQ(w.lhs, (*k)(w.x, w.y));
        EXPECT_EQ(w.rhs, a2_rhs(r.constants, w.x, w.y));
        EXPECT_GT(w.lhs, w.rhs);
        break;
      case Hypothesis::kA4:
        ASSERT_TRUE(f);
        EXPECT_EQ(w.lhs, f->rate(w.x));
        EXPECT_EQ(w.rhs, a4_rhs(r.constants, w.x));
        EXPECT_GT(w.lhs, w.rhs);
        break;
      case Hypothesis::kA5:
        if (f) {
          EXPECT_EQ(w.lhs, a5_lhs(*f, w.x, w.y));
        }
        EXPECT_EQ(w.rhs, a5_rhs(r.constants, w.x));
        EXPECT_LT(w.lhs, w.rhs);
        break;
      default:
        break;
    }
  }
}

}  // namespace

TEST(Audit, WorkedFragmentationExamplePasses) {
  auto f = FragmentationSpec::power_law(0.5, 0.0);
  auto c = worked_example(0.5, 0.0, 0.0);
  auto r = audit(CoagulationKernel::constant(1.0), f, c);
  EXPECT_EQ(r[Hypothesis::kA3].verdict, Verdict::kPass);
  EXPECT_EQ(r[Hypothesis::kA4].verdict, Verdict::kPass);
  EXPECT_EQ(r[Hypothesis::kA5].verdict, Verdict::kPass);
  EXPECT_EQ(r[Hypothesis::kA5].basis, "closed-form");
  EXPECT_TRUE(r.all_passed());
}

TEST(Audit, ConstantKernelPassesA2) {
  HypothesisConstants c;
  c.k1 = 2.0;
  c.mu = 0.0;
  auto r = audit(CoagulationKernel::constant(4.0), std::nullopt, c);
  EXPECT_EQ(r[Hypothesis::kA1].verdict, Verdict::kPass);
  EXPECT_EQ(r[Hypothesis::kA2].verdict, Verdict::kPass);
}

TEST(Audit, ProductKernelFailsA2WithWitness) {
  auto k = CoagulationKernel::product_power(1.0, 1.0, 1.0);
  HypothesisConstants c;
  c.mu = 0.9;
  auto r = audit(k, std::nullopt, c, small_plan());
  EXPECT_EQ(r[Hypothesis::kA2].verdict, Verdict::kFail);
  ASSERT_FALSE(r.witnesses.empty());
  bool large = false;
  for (const auto& w : r.witnesses) {
    if (w.hypothesis == Hypothesis::kA2 && w.x > 1e3 && w.y > 1e3) large = true;
  }
  EXPECT_TRUE(large);
  expect_witnesses_sound(r, k, std::nullopt);
}

TEST(Audit, WitnessesReproducible) {
  auto k = CoagulationKernel::product_power(1.0, 1.0, 1.0);
  HypothesisConstants c;
  c.mu = 0.5;
  auto r1 = audit(k, std::nullopt, c, small_plan());
  auto r2 = audit(k, std::nullopt, c, small_plan());
  ASSERT_EQ(r1.witnesses.size(), r2.witnesses.size());
  for (std::size_t i = 0; i < r1.witnesses.size(); ++i) {
    EXPECT_EQ(r1.witnesses[i].x, r2.witnesses[i].x);
    EXPECT_EQ(r1.witnesses[i].lhs, r2.witnesses[i].lhs);
  }
}

TEST(Audit, A4AndA5WitnessesSound) {
  auto f = FragmentationSpec::power_law(0.9, -0.5, 3.0);
  HypothesisConstants c;
  c.m = 1.0;     // too small for s0 = 3
  c.lambda = 0.5;
  c.L_gamma = 10.0;  // too large
  c.nu = 0.0;
  auto r = audit(std::nullopt, f, c, small_plan());
  EXPECT_EQ(r[Hypothesis::kA4].verdict, Verdict::kFail);
  EXPECT_EQ(r[Hypothesis::kA5].verdict, Verdict::kFail);
  expect_witnesses_sound(r, std::nullopt, f);
}

TEST(Audit, SuggestedConstantsPassPaperKernels) {
  for (const auto& k : {CoagulationKernel::shear(1.0), CoagulationKernel::modified_smoluchowski(1.0, 1.0),
                        CoagulationKernel::modified_smoluchowski(2.0, 0.3)}) {
    auto s = suggest_coagulation_constants(k);
    HypothesisConstants c;
    c.k1 = s.k1;
    c.mu = s.mu;
    auto r = audit(k, std::nullopt, c, small_plan());
    EXPECT_TRUE(r.passed(Hypothesis::kA1));
    EXPECT_TRUE(r.passed(Hypothesis::kA2)) << r[Hypothesis::kA2].detail;

    SamplePlan forced = small_plan();
    forced.force_sampling = true;
    auto rs = audit(k, std::nullopt, c, forced);
    EXPECT_EQ(rs[Hypothesis::kA2].verdict, Verdict::kSampledPass);
  }
}

TEST(Audit, SuggestionExamples) {
  auto shear = suggest_coagulation_constants(CoagulationKernel::shear(1.0));
  EXPECT_DOUBLE_EQ(shear.mu, 7.0 / 9.0);
  EXPECT_NEAR(shear.k1, std::pow(2.0, 7.0 / 6.0), 1e-14);
  auto cst = suggest_coagulation_constants(CoagulationKernel::constant(4.0));
  EXPECT_DOUBLE_EQ(cst.k1, 2.0);
  EXPECT_EQ(cst.mu, 0.0);
  auto fr = suggest_fragmentation_constants(FragmentationSpec::power_law(0.5, 0.0));
  EXPECT_DOUBLE_EQ(fr.nu, -0.5);
  EXPECT_DOUBLE_EQ(fr.L_gamma, 2.0);
  EXPECT_DOUBLE_EQ(fr.lambda, 0.5);
  EXPECT_THROW(suggest_coagulation_constants(
                   CoagulationKernel::custom_table({1, 2}, {1, 1, 1, 1})),
               UnsupportedError);
  EXPECT_THROW(suggest_coagulation_constants(CoagulationKernel::product_power(1, 1, 1)),
               UnsupportedError);
}

TEST(Audit, WorkedExampleUniquenessIffGammaAboveMu) {
  for (double gamma : {0.2, 0.5, 0.8}) {
    for (double alpha : {-0.5, 0.0}) {
      for (double mu : {0.0, 0.3, 0.6, 0.9}) {
        auto f = FragmentationSpec::power_law(gamma, alpha);
        auto r = audit(std::nullopt, f, worked_example(gamma, alpha, mu), small_plan());
        EXPECT_TRUE(r.passed(Hypothesis::kA3));
        EXPECT_TRUE(r.passed(Hypothesis::kA4));
        EXPECT_TRUE(r.passed(Hypothesis::kA5));
        EXPECT_EQ(r.passed(Hypothesis::kUniqueness), gamma > mu)
            << "gamma=" << gamma << " mu=" << mu;
      }
    }
  }
}

TEST(Audit, MonotoneInK1AndM) {
  auto k = CoagulationKernel::sum_power(1.0, 0.5, 0.5);
  auto f = FragmentationSpec::power_law(0.7, -0.3, 2.0);
  for (double k1 : {0.5, 1.0, 1.5}) {
    for (double m : {0.5, 2.0, 4.0}) {
      HypothesisConstants c;
      c.k1 = k1;
      c.mu = 0.5;
      c.m = m;
      c.lambda = 0.3;
      c.L_gamma = 0.5;
      c.nu = -0.3;
      auto r = audit(k, f, c, small_plan());
      HypothesisConstants bigger = c;
      bigger.k1 *= 2;
      bigger.m *= 2;
      auto rb = audit(k, f, bigger, small_plan());
      if (r.passed(Hypothesis::kA2)) {
        EXPECT_TRUE(rb.passed(Hypothesis::kA2));
      }
      if (r.passed(Hypothesis::kA4)) {
        EXPECT_TRUE(rb.passed(Hypothesis::kA4));
      }
    }
  }
}

TEST(Audit, NoFragmentationFailsA5) {
  auto r = audit(CoagulationKernel::constant(1.0), std::nullopt, HypothesisConstants{});
  EXPECT_EQ(r[Hypothesis::kA3].basis, "vacuous");
  EXPECT_EQ(r[Hypothesis::kA5].verdict, Verdict::kFail);
  expect_witnesses_sound(r, CoagulationKernel::constant(1.0), std::nullopt);
}

TEST(Audit, EmptyPlanRejected) {
  SamplePlan p;
  p.points = 0;
  EXPECT_THROW(audit(CoagulationKernel::constant(1.0), std::nullopt, {}, p), ConfigError);
  p = SamplePlan{};
  p.x_min = 0;
  EXPECT_THROW(audit(CoagulationKernel::constant(1.0), std::nullopt, {}, p), ConfigError);
}

TEST(Audit, CustomKernelIsSampled) {
  auto k = CoagulationKernel::custom_table({1e-6, 1e6}, {1, 1, 1, 1});
  auto r = audit(k, std::nullopt, HypothesisConstants{}, small_plan());
  EXPECT_EQ(r[Hypothesis::kA1].verdict, Verdict::kSampledPass);
  EXPECT_EQ(r[Hypothesis::kA2].verdict, Verdict::kSampledPass);
}
