#include "coagfrag/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "coagfrag/errors.hpp"

namespace coagfrag::oracles {

using boost::math::quadrature::gauss_kronrod;

double constant_coagulation(double t, double x) {
  const double s = t + 2.0;
  return 4.0 / (s * s) * std::exp(-2.0 * x / s);
}

double constant_coagulation_m0(double t) { return 2.0 / (t + 2.0); }
double constant_coagulation_m1(double) { return 1.0; }

double linear_binary_fragmentation(double t, double x) {
  const double s = 1.0 + t;
  return s * s * std::exp(-x * s);
}

double linear_binary_fragmentation_m0(double t) { return 1.0 + t; }
double linear_binary_fragmentation_m1(double) { return 1.0; }

double multiple_frag_number_growth(const FragmentationSpec& frag, double m0_initial,
                                   double m1_initial, double t) {
  if (frag.family() != RateFamily::kPowerLaw || frag.params().gamma != 1.0) {
    throw UnsupportedError("number growth closes only for S = s0 x (gamma = 1)");
  }
  return m0_initial + (frag.fragment_count() - 1.0) * frag.params().s0 * m1_initial * t;
}

double integrate_m0_ode(double m0_initial, double k0, double t, std::size_t steps) {
  if (steps == 0) throw DomainError("integrate_m0_ode needs steps > 0");
  auto f = [k0](double m) { return -0.5 * k0 * m * m; };
  const double h = t / static_cast<double>(steps);
  double m = m0_initial;
  for (std::size_t k = 0; k < steps; ++k) {
    const double a = f(m);
    const double b = f(m + 0.5 * h * a);
    const double c = f(m + 0.5 * h * b);
    const double d = f(m + h * c);
    m += h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
  }
  return m;
}

double continuum_rate(const Kernel2& K, const Profile& S, const Kernel2& b, const Profile& f,
                      double x) {
  if (!(x > 0.0)) throw DomainError("continuum_rate needs x > 0");
  constexpr double tol = 1e-12;
  const double fx = f(x);
  double rate = 0.0;
  if (K) {
    auto birth = [&](double y) { return K(x - y, y) * f(x - y) * f(y); };
    // Symmetric about x/2; integrate one half and double it.
    rate += gauss_kronrod<double, 31>::integrate(birth, 0.0, 0.5 * x, 15, tol);
    boost::math::quadrature::exp_sinh<double> tail;
    auto death = [&](double y) { return K(x, y) * f(y); };
    const double near = gauss_kronrod<double, 31>::integrate(death, 0.0, x, 15, tol);
    const double far = tail.integrate([&](double u) { return death(x + u); }, tol);
    rate -= fx * (near + far);
  }
  if (S && b) {
    boost::math::quadrature::exp_sinh<double> tail;
    rate += tail.integrate([&](double u) {
      const double y = x + u;
      return b(y, x) * S(y) * f(y);
    }, tol);
  }
  if (S) rate -= S(x) * fx;
  return rate;
}

double cell_average(const Profile& f, double a, double b) {
  return gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-12) / (b - a);
}

double relative_l1_error(const Density& d, const Profile& exact) {
  const auto& g = d.grid();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = g.widths()[i];
    const double e = cell_average(exact, g.lo(i), g.hi(i));
    num += std::fabs(d.value(i) - e) * w;
    den += std::fabs(e) * w;
  }
  return den > 0.0 ? num / den : num;
}

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> list = {
      {"scott-constant", "K = 1, f0 = exp(-x); f = 4/(t+2)^2 exp(-2x/(t+2)), M0 = 2/(t+2)"},
      {"ziff-linear-binary", "S = x, b = 2/y, f0 = exp(-x); f = (1+t)^2 exp(-x(1+t)), M0 = 1+t"},
      {"powerlaw-number-growth",
       "S = x, alpha = -0.5 (N = 3), f0 = exp(-x); M0 = 1 + 2t"},
  };
  return list;
}

bool is_fixture(std::string_view name) {
  const auto& f = fixtures();
  return std::any_of(f.begin(), f.end(), [&](const Fixture& x) { return x.name == name; });
}

}  // namespace coagfrag::oracles
