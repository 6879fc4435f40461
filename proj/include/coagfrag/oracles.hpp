#pragma once

// Closed-form reference solutions. Nothing here touches the sectional
// operator tables, so the comparisons in the tests are independent checks.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "coagfrag/grid.hpp"
#include "coagfrag/kernels.hpp"

namespace coagfrag::oracles {

// K = 1, f0 = exp(-x), no fragmentation.
double constant_coagulation(double t, double x);
double constant_coagulation_m0(double t);
double constant_coagulation_m1(double t);

// K = 0, S = x, b = 2/y, f0 = exp(-x).
double linear_binary_fragmentation(double t, double x);
double linear_binary_fragmentation_m0(double t);
double linear_binary_fragmentation_m1(double t);

/// M0(t) = M0(0) + (N-1) s0 M1(0) t for S = s0 x. UnsupportedError unless
/// the rate is the power law with gamma = 1.
double multiple_frag_number_growth(const FragmentationSpec& frag, double m0_initial,
                                   double m1_initial, double t);

/// Classic RK4 on M0' = -k0 M0^2 / 2.
double integrate_m0_ode(double m0_initial, double k0, double t, std::size_t steps = 1000);

using Kernel2 = std::function<double(double, double)>;
using Profile = std::function<double(double)>;

/// Right-hand side of the continuous equation at size x, evaluated by
/// adaptive quadrature:
///   1/2 int_0^x K(x-y,y) f(x-y) f(y) dy - f(x) int_0^inf K(x,y) f(y) dy
///   + int_x^inf b(y,x) S(y) f(y) dy - S(x) f(x)
/// Any of K, S, b may be empty (term omitted). b is called as b(parent, x).
double continuum_rate(const Kernel2& K, const Profile& S, const Kernel2& b, const Profile& f,
                      double x);

/// Cell average of a closed-form density over [a, b] (15-point Gauss-Kronrod).
double cell_average(const Profile& f, double a, double b);

/// sum_i |v_i - avg_i(exact)| width_i / sum_i |avg_i(exact)| width_i.
double relative_l1_error(const Density& d, const Profile& exact);

struct Fixture {
  std::string name;
  std::string description;
};

/// "scott-constant", "ziff-linear-binary", "powerlaw-number-growth".
const std::vector<Fixture>& fixtures();
bool is_fixture(std::string_view name);

}  // namespace coagfrag::oracles
