#include <gtest/gtest.h>

#include <cmath>

#include "coagfrag/errors.hpp"
#include "coagfrag/observables.hpp"
#include "coagfrag/operators.hpp"

using namespace coagfrag;

namespace {

std::shared_ptr<const Grid> grid(std::size_t n, double lo = 1e-3, double hi = 1e3) {
  GridSpec s;
  s.x_min = lo;
  s.x_max = hi;
  s.n_cells = n;
  return Grid::make(s);
}

}  // namespace

// conservative truncation drops overflow pairs from death too
TEST(Operators, DeathWeight) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::shear(1.0), std::nullopt, g);
  for (std::size_t i = 0; i < g->size(); i += 5) {
    for (std::size_t j = 0; j < t->inside_end(i); j += 3) {
      const double k = CoagulationKernel::shear(1.0)(g->pivots()[i], g->pivots()[j]);
      EXPECT_DOUBLE_EQ(t->death_weight(i, j), k * g->widths()[j]);
      EXPECT_EQ(t->kernel_at(i, j), t->kernel_at(j, i));
    }
  }
}

TEST(Operators, PairSplittingConservesMass) {
  auto g = grid(64);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  const auto p = g->pivots();
  const double last = p.back();
  for (std::size_t i = 0; i < g->size(); ++i) {
    for (std::size_t j = i; j < t->inside_end(i); ++j) {
      const auto& pt = t->pair_target(i, j);
      double mass = pt.to_lower * p[pt.cell];
      if (pt.cell + 1 < g->size()) mass += pt.to_upper * p[pt.cell + 1];
      EXPECT_NEAR(mass, p[i] + p[j], 1e-13 * (p[i] + p[j]));
      if (p[i] + p[j] <= last) {
        EXPECT_NEAR(pt.to_lower + pt.to_upper, 1.0, 1e-13);
      }
    }
  }
}

TEST(Operators, BinaryFragmentsNumberTwo) {
  auto g = grid(96);
  auto f = FragmentationSpec::power_law(1.0, 0.0);
  auto t = assemble(std::nullopt, f, g);
  const auto p = g->pivots();
  for (std::size_t j = 0; j < g->size(); ++j) {
    double number = t->dust_number(j) + t->fragment_number_defect(j);
    double mass = t->dust_mass(j);
    for (std::size_t i = 0; i < g->size(); ++i) {
      number += t->fragments(i, j);
      mass += p[i] * t->fragments(i, j);
      EXPECT_DOUBLE_EQ(t->birth_weight(j, i), t->rate_at(j) * t->fragments(i, j));
    }
    EXPECT_NEAR(number, 2.0, 1e-10);
    EXPECT_NEAR(mass, p[j], 1e-12 * p[j]);
  }
}

TEST(Operators, MultipleFragmentsNumber) {
  auto g = grid(64);
  auto t = assemble(std::nullopt, FragmentationSpec::power_law(1.0, -0.5), g);
  for (std::size_t j = 0; j < g->size(); ++j) {
    double number = t->dust_number(j) + t->fragment_number_defect(j);
    for (std::size_t i = 0; i < g->size(); ++i) number += t->fragments(i, j);
    EXPECT_NEAR(number, 3.0, 1e-10);
  }
}

TEST(Rhs, ZeroDensity) {
  auto g = grid(32);
  auto t = assemble(CoagulationKernel::constant(1.0), FragmentationSpec::power_law(1.0, 0.0), g);
  auto r = rhs(*t, Density::zero(g));
  for (double v : r.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r.overflow_mass_rate, 0.0);
}

TEST(Rhs, ConstantKernelNumberRate) {
  auto g = grid(256);
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g);
  auto d = project([](double x) { return std::exp(-x); }, g);
  auto r = rhs(*t, d);
  double dm0 = 0;
  for (std::size_t i = 0; i < g->size(); ++i) dm0 += r.values[i] * g->widths()[i];
  const double m0 = moment(d, 0.0);
  EXPECT_NEAR(dm0 / (-0.5 * m0 * m0), 1.0, 0.02);
}

TEST(Rhs, MonodisperseBinaryBreakup) {
  auto g = grid(64);
  auto t = assemble(std::nullopt, FragmentationSpec::power_law(1.0, 0.0), g);
  const std::size_t k = 50;
  const double p = g->pivots()[k];
  auto d = monodisperse(g, p, 1.0);
  auto r = rhs(*t, d);
  double dn = r.dust_number_rate + r.number_defect_rate;
  for (std::size_t i = 0; i < g->size(); ++i) {
    dn += r.values[i] * g->widths()[i];
    if (i > k) {
      EXPECT_EQ(r.values[i], 0.0);
    }
  }
  // one particle of size p breaks at rate p into two
  EXPECT_NEAR(dn, p, 1e-10 * p);
}

TEST(Rhs, GridMismatch) {
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, grid(32));
  EXPECT_THROW(rhs(*t, Density::zero(grid(64))), ContractViolation);
}

TEST(Assembly, BudgetExceeded) {
  AssemblyOptions o;
  o.max_table_bytes = 1024;
  EXPECT_THROW(assemble(CoagulationKernel::constant(1.0), std::nullopt, grid(64), o), AssemblyError);
}

TEST(Assembly, ClassicalTruncationReportsOverflow) {
  auto g = grid(32, 1e-3, 10.0);
  AssemblyOptions o;
  o.truncation = TruncationMode::kClassical;
  auto t = assemble(CoagulationKernel::constant(1.0), std::nullopt, g, o);
  auto d = project([](double x) { return std::exp(-x); }, g);
  auto r = rhs(*t, d);
  EXPECT_GT(r.overflow_mass_rate, 0.0);
  double dm1 = r.overflow_mass_rate;
  for (std::size_t i = 0; i < g->size(); ++i) dm1 += r.values[i] * g->widths()[i] * g->pivots()[i];
  EXPECT_NEAR(dm1, 0.0, 1e-12);
}
