#pragma once

// Moments M_r = sum_i p_i^r v_i width_i, their running time integrals
// I_r(t), and the moment-integrability ladder.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coagfrag/errors.hpp"
#include "coagfrag/grid.hpp"

namespace coagfrag {

/// Pivot-rule moments of a density; throws DomainError for negative orders.
std::vector<double> moments(const Density& d, std::span<const double> orders);
double moment(const Density& d, double order);

/// Same, from per-cell particle counts n_i = v_i * width_i.
std::vector<double> moments_of_numbers(const Grid& grid, std::span<const double> numbers,
                                       std::span<const double> orders);

/// Moments of a piecewise-constant table read from CSV (pivot and widths
/// taken from the table itself).
std::vector<double> moments(const DensityTable& table, std::span<const double> orders);

/// Time series of moments sampled on a snapshot schedule. Orders 0 and 1
/// always come first; I_r uses trapezoid accumulation over the samples.
class MomentSeries {
 public:
  explicit MomentSeries(std::span<const double> extra_orders = {});

  const std::vector<double>& orders() const { return orders_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  /// Appends one sample; `values` are moments in orders() order, t must not
  /// decrease.
  void append(double t, std::span<const double> values);
  void append(const Density& d);

  std::size_t index_of(double order) const;  // throws DomainError if absent
  bool has_order(double order) const;

  double value(std::size_t sample, std::size_t order_index) const {
    return values_[sample * orders_.size() + order_index];
  }
  double integral(std::size_t sample, std::size_t order_index) const {
    return integrals_[sample * orders_.size() + order_index];
  }
  std::vector<double> column(double order) const;
  std::vector<double> integral_column(double order) const;

 private:
  std::vector<double> orders_;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> integrals_;
};

/// Column label used in CSV output: "M0", "M1", "M0.5", ...
std::string moment_label(double order);

enum class LadderTermination { kReachedThreshold, kConditionViolated };

template <class T>
struct BasicLadderResult {
  T mu;
  T nu;
  T rho0;
  T delta;
  T increment;                  // 1 + nu - mu
  std::vector<T> sequence;      // rho_0 < rho_1 < ... < rho_K
  std::optional<T> terminal;    // 2 + nu - delta when the threshold is reached
  LadderTermination reason;
};

using LadderResult = BasicLadderResult<double>;

/// Raises the integrable moment order by 1 + nu - mu while rho - mu < 1,
/// then reports the terminal order 2 + nu - delta. When 1 + nu <= mu the
/// ladder cannot climb and the result is kConditionViolated.
/// Works for double and exact rational types (e.g. boost::rational).
template <class T>
BasicLadderResult<T> moment_ladder(T mu, T nu, T rho0, T delta,
                                   std::size_t max_steps = 1'000'000) {
  const T zero(0);
  const T one(1);
  const T two(2);
  if (!(mu >= zero && mu < one)) throw DomainError("ladder: mu must be in [0, 1)");
  if (!(nu > -one)) throw DomainError("ladder: nu must be > -1");
  if (!(rho0 >= one)) throw DomainError("ladder: rho0 must be >= 1");
  if (!(rho0 > mu)) throw DomainError("ladder: rho0 must exceed mu");
  if (!(delta > zero)) throw DomainError("ladder: delta must be > 0");

  BasicLadderResult<T> r{mu, nu, rho0, delta, one + nu - mu, {rho0}, std::nullopt,
                         LadderTermination::kReachedThreshold};
  if (!(one + nu > mu)) {
    r.reason = LadderTermination::kConditionViolated;
    return r;
  }
  T rho = rho0;
  while (rho - mu < one) {
    if (r.sequence.size() > max_steps) {
      throw DomainError("ladder: increment too small, step limit exceeded");
    }
    rho = rho + nu - mu + one;
    r.sequence.push_back(rho);
  }
  r.terminal = two + nu - delta;
  return r;
}

struct TrendReport {
  double order = 0.0;
  double final_time = 0.0;
  double integral = 0.0;        // I_order(t_final)
  double half_ratio = 0.0;      // I(t)/I(t/2); NaN when I(t/2) == 0
  double growth_exponent = 0.0; // local log-log slope of M_order at the end
  bool growth_flag = false;     // slope above the configured power
  bool bounded = true;          // finite integral and no growth flag
};

/// Growth diagnostics for I_order. Never a finiteness proof.
TrendReport integrability_probe(const MomentSeries& series, double order,
                                double max_growth_power = 4.0);

}  // namespace coagfrag
