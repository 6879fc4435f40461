#pragma once

// Two-solution distance and the Gronwall bound built from the uniqueness
// proof:
//   u(t)   = sum_i (1+p_i) |v_i^f - v_i^g| width_i
//   phi_f  = 2^(1+mu) k1^2 [M0(f) + M_(1+mu)(f)], likewise phi_g
//   phi    = phi_f + phi_g + L_frag,  L_frag = m N
//   bound  = u(0) exp(int_0^t phi ds)   (trapezoid on the sample times)
//   margin = bound (1 + tau) - u

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "coagfrag/grid.hpp"
#include "coagfrag/kernels.hpp"
#include "coagfrag/operators.hpp"
#include "coagfrag/solver.hpp"

namespace coagfrag {

/// Weighted norm of f - g. ContractViolation on grid mismatch.
double distance(const Density& f, const Density& g);

/// Plain L1 distance sum_i |v_i^f - v_i^g| width_i.
double l1_distance(const Density& f, const Density& g);

enum class PerturbationShape { kSinLog, kUniform };
PerturbationShape parse_perturbation_shape(const std::string& name);

/// g0 = f0 (1 + eps shape). kSinLog uses sin(log p) shifted so that M1 is
/// unchanged; kUniform uses shape = 1.
Density perturb(const Density& f0, double epsilon, PerturbationShape shape);

struct GronwallSample {
  double t = 0.0;
  double u = 0.0;
  double phi = 0.0;
  double integral_phi = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool ok = true;
};

struct GronwallTrace {
  HypothesisConstants constants;
  double fragment_count = 0.0;  // N, 0 without fragmentation
  double L_frag = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  std::vector<GronwallSample> samples;

  bool violated() const;
};

/// Assembles the trace from two runs sampled at the same times. Each run's
/// moment series must contain the order 1 + mu.
GronwallTrace gronwall_trace(const RunReport& f, const RunReport& g,
                             const HypothesisConstants& constants, double fragment_count,
                             double tau);

/// Evolves f0 and its perturbation to t_end with `samples` uniform intervals.
GronwallTrace gronwall_run(const OperatorTables& tables, const Density& f0, double epsilon,
                           PerturbationShape shape, double t_end, std::size_t samples,
                           const ControllerConfig& controller,
                           const HypothesisConstants& constants, double tau);

struct RefinementReport {
  std::vector<std::size_t> levels;
  std::vector<double> distances;  // L1 between level k and k+1 at t_end
  std::vector<double> orders;     // log(d_k / d_k+1) / log(n_k+2 / n_k+1)
  bool decreasing = false;
  double min_order = 0.0;
};

/// solve(n) returns the final density on an n-cell grid (same domain for
/// every level). Finer solutions are remapped onto the coarser grid before
/// differencing. Requires >= 3 levels.
RefinementReport refinement_consistency(const std::function<Density(std::size_t)>& solve,
                                        const std::vector<std::size_t>& levels);

}  // namespace coagfrag
