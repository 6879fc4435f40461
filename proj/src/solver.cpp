#include "coagfrag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coagfrag/errors.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace coagfrag {
namespace {

// Bogacki-Shampine 3(2), first-same-as-last.
constexpr double kA21 = 0.5;
constexpr double kA32 = 0.75;
constexpr double kB1 = 2.0 / 9.0;
constexpr double kB2 = 1.0 / 3.0;
constexpr double kB3 = 4.0 / 9.0;
constexpr double kE1 = 2.0 / 9.0 - 7.0 / 24.0;
constexpr double kE2 = 1.0 / 3.0 - 1.0 / 4.0;
constexpr double kE3 = 4.0 / 9.0 - 1.0 / 3.0;
constexpr double kE4 = -1.0 / 8.0;

class Integrator {
 public:
  Integrator(const OperatorTables& tables, std::vector<double> state, double t,
             const ControllerConfig& config, double h_initial)
      : tables_(tables),
        config_(config),
        n_(tables.size()),
        y_(std::move(state)),
        t_(t),
        h_suggest_(h_initial) {
    const std::size_t m = tables.state_size();
    y_.resize(m, 0.0);
    k1_.resize(m);
    k2_.resize(m);
    k3_.resize(m);
    k4_.resize(m);
    stage_.resize(m);
    candidate_.resize(m);
    err_.resize(m);
    weights_.resize(n_);
    const auto p = tables.grid().pivots();
    for (std::size_t i = 0; i < n_; ++i) weights_[i] = 1.0 + p[i];
  }

  double t() const { return t_; }
  const std::vector<double>& state() const { return y_; }
  std::size_t rhs_evaluations() const { return evaluations_; }

  StepStats advance(double h_max) {
    const auto& kt = simd::active();
    if (!k1_valid_) {
      rho_ = eval(y_, k1_);
      k1_valid_ = true;
    }
    double h = std::min(h_suggest_, h_max);
    if (rho_ > 0.0) h = std::min(h, config_.safety / rho_);
    StepStats stats;
    const double norm_y = kt.weighted_abs_sum(weights_.data(), y_.data(), n_);
    const std::size_t m = y_.size();
    for (;;) {
      if (h < config_.dt_min && h < h_max) {
        std::ostringstream os;
        os << "time step " << h << " fell below " << config_.dt_min << " at t = " << t_
           << "; the problem is too stiff for the explicit stepper, reduce the size "
              "domain (x_max) or the rates, or use an implicit extension";
        throw StiffnessError(os.str());
      }
      kt.lincomb2(y_.data(), h, kA21, k1_.data(), 0.0, k1_.data(), stage_.data(), m);
      eval(stage_, k2_);
      kt.lincomb2(y_.data(), h, 0.0, k1_.data(), kA32, k2_.data(), stage_.data(), m);
      eval(stage_, k3_);
      kt.lincomb3(y_.data(), h, kB1, k1_.data(), kB2, k2_.data(), kB3, k3_.data(),
                  candidate_.data(), m);
      const double rho_new = eval(candidate_, k4_);
      kt.lincomb4(h, kE1, k1_.data(), kE2, k2_.data(), kE3, k3_.data(), kE4, k4_.data(),
                  err_.data(), n_);
      const double err = kt.weighted_abs_sum(weights_.data(), err_.data(), n_);
      const double norm_new = kt.weighted_abs_sum(weights_.data(), candidate_.data(), n_);
      const double tol = config_.atol + config_.rtol * std::max(norm_y, norm_new);
      if (!(err <= tol)) {
        ++stats.error_rejections;
        const double f = std::isfinite(err) ? 0.9 * std::cbrt(tol / err) : config_.min_shrink;
        h *= std::max(config_.min_shrink, std::min(f, 0.9));
        continue;
      }
      double lo = 0.0;
      double hi = 0.0;
      kt.minmax(candidate_.data(), n_, &lo, &hi);
      if (lo < -1e-12 * std::max(hi, 0.0)) {
        ++stats.positivity_clips_requested;
        h *= 0.5;
        continue;
      }

      stats.dt = h;
      stats.error_estimate = err;
      stats.overflow_flux = candidate_[n_ + kAuxOverflowMass] - y_[n_ + kAuxOverflowMass];
      stats.dust_flux = candidate_[n_ + kAuxDustMass] - y_[n_ + kAuxDustMass];
      stats.number_defect = candidate_[n_ + kAuxNumberDefect] - y_[n_ + kAuxNumberDefect];
      const bool clamped = h == h_max;
      t_ = clamped ? t_ + h_max : t_ + h;
      std::swap(y_, candidate_);
      std::swap(k1_, k4_);
      rho_ = rho_new;
      const double f = err > 0.0 ? 0.9 * std::cbrt(tol / err) : config_.max_growth;
      const double next = h * std::min(config_.max_growth, std::max(f, config_.min_shrink));
      h_suggest_ = clamped ? std::max(next, h_suggest_) : next;
      stats.t = t_;
      return stats;
    }
  }

 private:
  double eval(const std::vector<double>& y, std::vector<double>& out) {
    ++evaluations_;
    return tables_.evaluate(y, out);
  }

  const OperatorTables& tables_;
  ControllerConfig config_;
  std::size_t n_;
  std::vector<double> y_;
  double t_;
  double h_suggest_;
  double rho_ = 0.0;
  bool k1_valid_ = false;
  std::size_t evaluations_ = 0;
  std::vector<double> k1_, k2_, k3_, k4_, stage_, candidate_, err_, weights_;
};

Snapshot make_snapshot(const OperatorTables& tables, const std::vector<double>& state,
                       double t) {
  const std::size_t n = tables.size();
  Snapshot s{Density::from_numbers(tables.grid_ptr(), std::span(state.data(), n), t)};
  s.overflow_cum = state[n + kAuxOverflowMass];
  s.dust_cum = state[n + kAuxDustMass];
  s.dust_number_cum = state[n + kAuxDustNumber];
  s.number_defect_cum = state[n + kAuxNumberDefect];
  return s;
}

}  // namespace

StepResult step(const OperatorTables& tables, const Density& d, double dt_target,
                const ControllerConfig& config) {
  if (!(dt_target > 0.0)) throw DomainError("dt_target must be > 0");
  if (!(d.grid() == tables.grid())) {
    throw ContractViolation("density and operator tables use different grids");
  }
  Integrator integ(tables, d.numbers(), d.time(), config, dt_target);
  StepResult r{d, integ.advance(dt_target)};
  r.density = make_snapshot(tables, integ.state(), integ.t()).density;
  return r;
}

OutputSchedule OutputSchedule::uniform(double t_end, std::size_t intervals) {
  OutputSchedule s;
  if (intervals == 0 || !(t_end > 0.0)) return s;
  for (std::size_t k = 1; k <= intervals; ++k) {
    s.times.push_back(k == intervals ? t_end
                                     : t_end * static_cast<double>(k) /
                                           static_cast<double>(intervals));
  }
  return s;
}

RunReport evolve(const OperatorTables& tables, const Density& d0, double t_end,
                 const OutputSchedule& schedule, const ControllerConfig& config,
                 std::span<const double> extra_orders) {
  if (!(d0.grid() == tables.grid())) {
    throw ContractViolation("density and operator tables use different grids");
  }
  const double t0 = d0.time();
  if (!(t_end >= t0)) throw DomainError("t_end must not precede the initial time");

  std::vector<double> outputs;
  for (double t : schedule.times) {
    if (!(t > t0 && t <= t_end)) continue;
    if (!outputs.empty() && !(t > outputs.back())) {
      throw DomainError("snapshot times must be strictly increasing");
    }
    outputs.push_back(t);
  }
  if (t_end > t0 && (outputs.empty() || outputs.back() < t_end)) outputs.push_back(t_end);

  RunReport report{{}, MomentSeries(extra_orders), {}, 0.0, {}};
  Integrator integ(tables, d0.numbers(), t0, config, config.dt_initial);
  const std::size_t n = tables.size();
  const auto pivots = tables.grid().pivots();
  const double m1_initial = simd::dot(pivots, std::span(integ.state().data(), n));

  auto record = [&](double t) {
    Snapshot snap = make_snapshot(tables, integ.state(), t);
    report.moments.append(snap.density);
    MassBalanceRecord mb;
    mb.t = t;
    mb.m1 = simd::dot(pivots, std::span(integ.state().data(), n));
    mb.overflow = snap.overflow_cum;
    mb.dust = snap.dust_cum;
    const double scale = m1_initial != 0.0 ? std::fabs(m1_initial) : 1.0;
    mb.relative_defect = std::fabs(mb.m1 + mb.overflow + mb.dust - m1_initial) / scale;
    report.max_mass_defect = std::max(report.max_mass_defect, mb.relative_defect);
    report.mass_balance.push_back(mb);
    report.snapshots.push_back(std::move(snap));
  };

  record(t0);
  auto& summary = report.steps;
  for (double t_out : outputs) {
    while (integ.t() < t_out) {
      const StepStats s = integ.advance(t_out - integ.t());
      ++summary.accepted;
      summary.error_rejections += s.error_rejections;
      summary.positivity_clips_requested += s.positivity_clips_requested;
      summary.dt_min = summary.accepted == 1 ? s.dt : std::min(summary.dt_min, s.dt);
      summary.dt_max = std::max(summary.dt_max, s.dt);
      summary.max_error_estimate = std::max(summary.max_error_estimate, s.error_estimate);
    }
    record(t_out);
  }
  summary.rhs_evaluations = integ.rhs_evaluations();
  summary.number_defect_total = integ.state()[n + kAuxNumberDefect];
  return report;
}

}  // namespace coagfrag
