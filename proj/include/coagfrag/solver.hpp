#pragma once

// Adaptive explicit time integration of the sectional system.

#include <cstddef>
#include <memory>
#include <vector>

#include "coagfrag/grid.hpp"
#include "coagfrag/observables.hpp"
#include "coagfrag/operators.hpp"

namespace coagfrag {

struct ControllerConfig {
  double rtol = 1e-6;
  double atol = 1e-10;
  // dt <= safety / (largest per-particle loss rate).
  double safety = 0.5;
  double dt_initial = 1e-3;
  double dt_min = 1e-12;
  double max_growth = 5.0;
  double min_shrink = 0.2;

  bool operator==(const ControllerConfig&) const = default;
};

struct StepStats {
  double t = 0.0;                 // time after the step
  double dt = 0.0;
  double error_estimate = 0.0;    // weighted norm of the embedded difference
  double overflow_flux = 0.0;     // mass leaving above x_max during the step
  double dust_flux = 0.0;         // mass leaving below x_min during the step
  double number_defect = 0.0;     // particles created (<0) or lost (>0) by lumping
  std::size_t positivity_clips_requested = 0;  // candidates rejected for negativity
  std::size_t error_rejections = 0;
};

struct StepResult {
  Density density;
  StepStats stats;
};

/// One accepted Bogacki-Shampine 3(2) step of size at most dt_target.
/// Throws StiffnessError if dt falls below config.dt_min.
StepResult step(const OperatorTables& tables, const Density& d, double dt_target,
                const ControllerConfig& config = {});

/// Snapshot times in (0, t_end]; t = 0 is always recorded.
struct OutputSchedule {
  std::vector<double> times;

  static OutputSchedule uniform(double t_end, std::size_t intervals);
};

struct Snapshot {
  Density density;
  double overflow_cum = 0.0;
  double dust_cum = 0.0;
  double dust_number_cum = 0.0;
  double number_defect_cum = 0.0;
};

struct MassBalanceRecord {
  double t = 0.0;
  double m1 = 0.0;
  double overflow = 0.0;
  double dust = 0.0;
  double relative_defect = 0.0;  // |M1 + overflow + dust - M1(0)| / M1(0)
};

struct StepSummary {
  std::size_t accepted = 0;
  std::size_t error_rejections = 0;
  std::size_t positivity_clips_requested = 0;
  std::size_t rhs_evaluations = 0;
  double dt_min = 0.0;
  double dt_max = 0.0;
  double max_error_estimate = 0.0;
  double number_defect_total = 0.0;
};

struct RunReport {
  std::vector<Snapshot> snapshots;
  MomentSeries moments;
  std::vector<MassBalanceRecord> mass_balance;
  double max_mass_defect = 0.0;
  StepSummary steps;

  const Density& final_density() const { return snapshots.back().density; }
};

/// Integrates from d0.time() to t_end, recording a snapshot and a moment
/// sample at every scheduled time.
RunReport evolve(const OperatorTables& tables, const Density& d0, double t_end,
                 const OutputSchedule& schedule, const ControllerConfig& config = {},
                 std::span<const double> extra_orders = {});

}  // namespace coagfrag
