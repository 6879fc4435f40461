#include "coagfrag/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coagfrag/errors.hpp"
#include "coagfrag/observables.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace coagfrag {

double distance(const Density& f, const Density& g) {
  require_same_grid(f, g);
  return simd::weighted_abs_diff(f.grid().norm_weights(), f.values(), g.values());
}

double l1_distance(const Density& f, const Density& g) {
  require_same_grid(f, g);
  return simd::weighted_abs_diff(f.grid().widths(), f.values(), g.values());
}

PerturbationShape parse_perturbation_shape(const std::string& name) {
  if (name == "sin-log") return PerturbationShape::kSinLog;
  if (name == "uniform") return PerturbationShape::kUniform;
  throw ConfigError("unknown perturbation shape '" + name + "' (expected sin-log or uniform)");
}

Density perturb(const Density& f0, double epsilon, PerturbationShape shape) {
  const auto p = f0.grid().pivots();
  const std::size_t n = f0.size();
  std::vector<double> s(n, 1.0);
  if (shape == PerturbationShape::kSinLog) {
    for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(std::log(p[i]));
    // Shift so that sum p_i n_i s_i = 0.
    const auto nums = f0.numbers();
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = p[i] * nums[i];
    const double total = simd::sum(mass);
    const double c = total != 0.0 ? simd::dot(mass, s) / total : 0.0;
    for (auto& x : s) x -= c;
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f0.value(i) * (1.0 + epsilon * s[i]);
  return Density(f0.grid_ptr(), std::move(v), f0.time());
}

bool GronwallTrace::violated() const {
  return std::any_of(samples.begin(), samples.end(), [](const GronwallSample& s) { return !s.ok; });
}

GronwallTrace gronwall_trace(const RunReport& f, const RunReport& g,
                             const HypothesisConstants& constants, double fragment_count,
                             double tau) {
  if (f.snapshots.size() != g.snapshots.size()) {
    throw ContractViolation("gronwall_trace: runs have different sample counts");
  }
  GronwallTrace tr;
  tr.constants = constants;
  tr.fragment_count = fragment_count;
  tr.L_frag = constants.m * fragment_count;
  tr.tau = tau;
  const double order = 1.0 + constants.mu;
  const std::size_t r0 = f.moments.index_of(0.0);
  const std::size_t rf = f.moments.index_of(order);
  const std::size_t r0g = g.moments.index_of(0.0);
  const std::size_t rg = g.moments.index_of(order);
  const double pre = std::pow(2.0, 1.0 + constants.mu) * constants.k1 * constants.k1;
  double integral = 0.0;
  double prev_phi = 0.0;
  double u0 = 0.0;
  for (std::size_t s = 0; s < f.snapshots.size(); ++s) {
    const Density& a = f.snapshots[s].density;
    const Density& b = g.snapshots[s].density;
    if (a.time() != b.time()) throw ContractViolation("gronwall_trace: sample times differ");
    GronwallSample gs;
    gs.t = a.time();
    gs.u = distance(a, b);
    const double phi_f = pre * (f.moments.value(s, r0) + f.moments.value(s, rf));
    const double phi_g = pre * (g.moments.value(s, r0g) + g.moments.value(s, rg));
    gs.phi = phi_f + phi_g + tr.L_frag;
    if (s == 0) {
      u0 = gs.u;
    } else {
      integral += 0.5 * (gs.t - tr.samples.back().t) * (prev_phi + gs.phi);
    }
    prev_phi = gs.phi;
    gs.integral_phi = integral;
    gs.bound = u0 * std::exp(integral);
    gs.margin = gs.bound * (1.0 + tau) - gs.u;
    gs.ok = gs.u <= gs.bound * (1.0 + tau) && std::isfinite(gs.phi);
    tr.samples.push_back(gs);
  }
  return tr;
}

GronwallTrace gronwall_run(const OperatorTables& tables, const Density& f0, double epsilon,
                           PerturbationShape shape, double t_end, std::size_t samples,
                           const ControllerConfig& controller,
                           const HypothesisConstants& constants, double tau) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  const Density g0 = perturb(f0, epsilon, shape);
  const auto schedule = OutputSchedule::uniform(t_end, samples);
  const double orders[] = {1.0 + constants.mu};
  const RunReport rf = evolve(tables, f0, t_end, schedule, controller, orders);
  const RunReport rg = evolve(tables, g0, t_end, schedule, controller, orders);
  const double n = tables.fragmentation() ? tables.fragmentation()->fragment_count() : 0.0;
  GronwallTrace tr = gronwall_trace(rf, rg, constants, n, tau);
  tr.epsilon = epsilon;
  return tr;
}

RefinementReport refinement_consistency(const std::function<Density(std::size_t)>& solve,
                                        const std::vector<std::size_t>& levels) {
  if (levels.size() < 3) throw DomainError("refinement needs at least 3 levels");
  RefinementReport rep;
  rep.levels = levels;
  std::vector<Density> sols;
  for (std::size_t n : levels) sols.push_back(solve(n));
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    const Density& coarse = sols[k];
    const Density& fine = sols[k + 1];
    const Density fine_on_coarse = remap(to_table(fine), coarse.grid_ptr(), coarse.time());
    rep.distances.push_back(l1_distance(coarse, fine_on_coarse));
  }
  rep.decreasing = true;
  rep.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < rep.distances.size(); ++k) {
    const double a = rep.distances[k];
    const double b = rep.distances[k + 1];
    if (!(b < a)) rep.decreasing = false;
    double order = std::numeric_limits<double>::quiet_NaN();
    if (a > 0.0 && b > 0.0) {
      order = std::log(a / b) /
              std::log(static_cast<double>(levels[k + 2]) / static_cast<double>(levels[k + 1]));
      rep.min_order = std::min(rep.min_order, order);
    }
    rep.orders.push_back(order);
  }
  if (rep.orders.empty() || std::isnan(rep.orders.front())) {
    rep.min_order = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace coagfrag
