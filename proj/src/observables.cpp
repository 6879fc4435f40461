#include "coagfrag/observables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "coagfrag/simd/kernels.hpp"

namespace coagfrag {
namespace {

void check_orders(std::span<const double> orders) {
  for (double r : orders) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw DomainError("moment order must be finite and >= 0, got " + moment_label(r));
    }
  }
}

std::vector<double> powers(std::span<const double> pivots, double order) {
  std::vector<double> w(pivots.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = order == 0.0 ? 1.0 : (order == 1.0 ? pivots[i] : std::pow(pivots[i], order));
  }
  return w;
}

}  // namespace

std::vector<double> moments_of_numbers(const Grid& grid, std::span<const double> numbers,
                                       std::span<const double> orders) {
  check_orders(orders);
  std::vector<double> out;
  out.reserve(orders.size());
  for (double r : orders) {
    const auto w = powers(grid.pivots(), r);
    out.push_back(simd::dot(w, numbers));
  }
  return out;
}

std::vector<double> moments(const Density& d, std::span<const double> orders) {
  const auto numbers = d.numbers();
  return moments_of_numbers(d.grid(), numbers, orders);
}

double moment(const Density& d, double order) {
  const double r[] = {order};
  return moments(d, r).front();
}

std::vector<double> moments(const DensityTable& table, std::span<const double> orders) {
  check_orders(orders);
  std::vector<double> numbers(table.size());
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    numbers[i] = table.value[i] * (table.edge_hi[i] - table.edge_lo[i]);
  }
  std::vector<double> out;
  for (double r : orders) {
    const auto w = powers(table.pivot, r);
    out.push_back(simd::dot(w, numbers));
  }
  return out;
}

std::string moment_label(double order) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), order);
  return "M" + std::string(buf, res.ptr);
}

MomentSeries::MomentSeries(std::span<const double> extra_orders) : orders_{0.0, 1.0} {
  check_orders(extra_orders);
  for (double r : extra_orders) {
    if (std::find(orders_.begin(), orders_.end(), r) == orders_.end()) orders_.push_back(r);
  }
}

void MomentSeries::append(double t, std::span<const double> values) {
  if (values.size() != orders_.size()) {
    throw ContractViolation("moment sample has wrong number of orders");
  }
  if (!times_.empty() && t < times_.back()) {
    throw ContractViolation("moment samples must be appended in time order");
  }
  const std::size_t k = orders_.size();
  const std::size_t prev = times_.size();
  times_.push_back(t);
  values_.insert(values_.end(), values.begin(), values.end());
  for (std::size_t r = 0; r < k; ++r) {
    double acc = 0.0;
    if (prev > 0) {
      const double dt = t - times_[prev - 1];
      acc = integrals_[(prev - 1) * k + r] +
            0.5 * dt * (values_[(prev - 1) * k + r] + values_[prev * k + r]);
    }
    integrals_.push_back(acc);
  }
}

void MomentSeries::append(const Density& d) { append(d.time(), moments(d, orders_)); }

bool MomentSeries::has_order(double order) const {
  return std::find(orders_.begin(), orders_.end(), order) != orders_.end();
}

std::size_t MomentSeries::index_of(double order) const {
  const auto it = std::find(orders_.begin(), orders_.end(), order);
  if (it == orders_.end()) {
    throw DomainError("moment order " + moment_label(order) + " not sampled in this series");
  }
  return static_cast<std::size_t>(it - orders_.begin());
}

std::vector<double> MomentSeries::column(double order) const {
  const std::size_t r = index_of(order);
  std::vector<double> out(size());
  for (std::size_t s = 0; s < size(); ++s) out[s] = value(s, r);
  return out;
}

std::vector<double> MomentSeries::integral_column(double order) const {
  const std::size_t r = index_of(order);
  std::vector<double> out(size());
  for (std::size_t s = 0; s < size(); ++s) out[s] = integral(s, r);
  return out;
}

TrendReport integrability_probe(const MomentSeries& series, double order,
                                double max_growth_power) {
  TrendReport rep;
  rep.order = order;
  const auto m = series.column(order);
  const auto integ = series.integral_column(order);
  const auto& t = series.times();
  if (t.empty()) return rep;
  rep.final_time = t.back();
  rep.integral = integ.back();

  const double half = 0.5 * rep.final_time;
  double i_half = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] >= half) {
      const double span = t[k] - t[k - 1];
      const double w = span > 0.0 ? (half - t[k - 1]) / span : 1.0;
      i_half = integ[k - 1] + w * (integ[k] - integ[k - 1]);
      break;
    }
  }
  rep.half_ratio = i_half > 0.0 ? rep.integral / i_half
                                 : std::numeric_limits<double>::quiet_NaN();

  const std::size_t n = t.size();
  if (n >= 2 && t[n - 2] > 0.0 && m[n - 2] > 0.0 && m[n - 1] > 0.0 && t[n - 1] > t[n - 2]) {
    rep.growth_exponent = std::log(m[n - 1] / m[n - 2]) / std::log(t[n - 1] / t[n - 2]);
  }
  rep.growth_flag = rep.growth_exponent > max_growth_power;
  rep.bounded = std::isfinite(rep.integral) && !rep.growth_flag;
  return rep;
}

}  // namespace coagfrag
