#include <gtest/gtest.h>

#include <cmath>

#include "coagfrag/errors.hpp"
#include "coagfrag/observables.hpp"
#include "coagfrag/oracles.hpp"
#include "coagfrag/solver.hpp"

using namespace coagfrag;

namespace {

std::shared_ptr<const Grid> grid(std::size_t n, double lo = 1e-3, double hi = 1e3) {
  GridSpec s;
  s.x_min = lo;
  s.x_max = hi;
  s.n_cells = n;
  return Grid::make(s);
}

Density exp_profile(const std::shared_ptr<const Grid>& g) {
  return project([](double x) { return std::exp(-x); }, g);
}

}  // namespace

TEST(Step, ZeroDensityUnchanged) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  auto r = step(*t, Density::zero(g), 0.25);
  EXPECT_EQ(r.stats.dt, 0.25);
  EXPECT_EQ(r.density.time(), 0.25);
  for (double v : r.density.values()) EXPECT_EQ(v, 0.0);
}

TEST(Step, RejectsNonPositiveDt) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  EXPECT_ANY_THROW(step(*t, Density::zero(g), 0.0));
}

TEST(Step, StiffnessError) {
  auto g = grid(32);
  auto t = assemble(std::nullopt, FragmentationSpec::power_law(1.0, 0.0), g);
  ControllerConfig c;
  c.dt_min = 1e-2;  // guard needs dt <= 0.5 / 1000
  EXPECT_THROW(step(*t, exp_profile(g), 0.1, c), StiffnessError);
}

TEST(Evolve, ZeroEndTime) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  auto r = evolve(*t, exp_profile(g), 0.0, OutputSchedule::uniform(0.0, 1));
  EXPECT_EQ(r.snapshots.size(), 1u);
  EXPECT_EQ(r.moments.size(), 1u);
}

TEST(Evolve, ConstantKernelNumber) {
  auto g = grid(128);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  auto r = evolve(*t, exp_profile(g), 1.0, OutputSchedule::uniform(1.0, 4));
  EXPECT_EQ(r.snapshots.size(), 5u);
  EXPECT_EQ(r.final_density().time(), 1.0);
  EXPECT_NEAR(moment(r.final_density(), 0.0) / (2.0 / 3.0), 1.0, 0.01);
}

TEST(Evolve, CoagulationConservesMass) {
  auto g = grid(96);
  auto t = assemble(CoagulationKernel::sum_power(1.0, 0.5, 0.5), std::nullopt, g);
  auto d0 = exp_profile(g);
  auto r = evolve(*t, d0, 2.0, OutputSchedule::uniform(2.0, 4));
  const double m10 = moment(d0, 1.0);
  for (const auto& s : r.snapshots) {
    const double m1 = moment(s.density, 1.0);
    EXPECT_LE(std::abs(m1 + s.overflow_cum - m10), 1e-9 * m10 * std::max(1.0, s.density.time()));
  }
  EXPECT_LE(r.max_mass_defect, 2e-9);
}

TEST(Evolve, FragmentationConservesMassNetOfDust) {
  auto g = grid(96);
  auto t = assemble(std::nullopt, FragmentationSpec::power_law(1.0, 0.0), g);
  auto d0 = exp_profile(g);
  auto r = evolve(*t, d0, 1.0, OutputSchedule::uniform(1.0, 4));
  const double m10 = moment(d0, 1.0);
  for (const auto& s : r.snapshots) {
    EXPECT_LE(std::abs(moment(s.density, 1.0) + s.dust_cum - m10), 1e-8 * m10);
  }
}

TEST(Evolve, NumberBalanceOfMultipleFragmentation) {
  auto g = grid(160, 1e-6, 1e2);
  auto frag = FragmentationSpec::power_law(1.0, -0.5);
  auto t = assemble(std::nullopt, frag, g);
  OutputSchedule s;
  s.times = {0.49, 0.5, 0.51};
  auto r = evolve(*t, exp_profile(g), 0.51, s);
  const auto m0 = r.moments.column(0.0);
  const double fd = (m0[3] - m0[1]) / 0.02;
  double expect = 0;
  const auto& d = r.snapshots[2].density;
  for (std::size_t i = 0; i < g->size(); ++i) {
    expect += frag.rate(g->pivots()[i]) * d.value(i) * g->widths()[i];
  }
  expect *= frag.fragment_count() - 1;
  EXPECT_NEAR(fd / expect, 1.0, 0.01);
}

TEST(Evolve, StaysNonnegative) {
  auto g = grid(64);
  auto t = assemble(CoagulationKernel::constant(1.0), FragmentationSpec::power_law(1.0, 0.0), g);
  auto r = evolve(*t, monodisperse(g, 1.0, 1.0), 2.0, OutputSchedule::uniform(2.0, 8));
  for (const auto& s : r.snapshots) EXPECT_TRUE(s.density.nonnegative_within_roundoff());
}

TEST(Evolve, CombinedMassDrift) {
  auto g = grid(128);
  auto t = assemble(CoagulationKernel::constant(1.0), FragmentationSpec::power_law(1.0, 0.0), g);
  auto d0 = exp_profile(g);
  auto r = evolve(*t, d0, 5.0, OutputSchedule::uniform(5.0, 5));
  EXPECT_LE(std::abs(moment(r.final_density(), 1.0) / moment(d0, 1.0) - 1.0), 5e-3);
}

TEST(Evolve, Deterministic) {
  auto g = grid(64);
  auto t = assemble(CoagulationKernel::shear(1.0), FragmentationSpec::power_law(0.5, -0.5), g);
  auto a = evolve(*t, exp_profile(g), 0.5, OutputSchedule::uniform(0.5, 2));
  auto b = evolve(*t, exp_profile(g), 0.5, OutputSchedule::uniform(0.5, 2));
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const auto va = a.snapshots[k].density.values();
    const auto vb = b.snapshots[k].density.values();
    EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  }
  EXPECT_EQ(a.steps.accepted, b.steps.accepted);
}

TEST(Evolve, ScheduleMustIncrease) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  OutputSchedule s;
  s.times = {0.5, 0.2};
  EXPECT_THROW(evolve(*t, exp_profile(g), 1.0, s), DomainError);
}

TEST(Evolve, ConvergesUnderRefinement) {
  auto l1_err = [](std::size_t n) {
    auto g = grid(n);
    auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
    auto r = evolve(*t, exp_profile(g), 1.0, OutputSchedule::uniform(1.0, 1));
    return oracles::relative_l1_error(
        r.final_density(), [](double x) { return oracles::constant_coagulation(1.0, x); });
  };
  EXPECT_GE(l1_err(128) / l1_err(256), 1.8);
}
