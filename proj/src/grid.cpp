#include "coagfrag/grid.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coagfrag/errors.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace coagfrag {

std::string_view to_string(PivotRule rule) {
  return rule == PivotRule::kMidpoint ? "midpoint" : "geometric";
}

PivotRule parse_pivot_rule(std::string_view name) {
  if (name == "midpoint") return PivotRule::kMidpoint;
  if (name == "geometric") return PivotRule::kGeometric;
  throw ConfigError("unknown pivot rule '" + std::string(name) +
                    "' (expected midpoint or geometric)");
}

std::vector<std::string> validate(const GridSpec& spec) {
  std::vector<std::string> errors;
  if (!(std::isfinite(spec.x_min) && spec.x_min > 0.0)) errors.push_back("x_min must be > 0");
  if (!(std::isfinite(spec.x_max) && spec.x_max > spec.x_min)) {
    errors.push_back("x_max must be > x_min");
  }
  if (spec.n_cells < 8) errors.push_back("n_cells must be >= 8");
  if (errors.empty()) {
    const double r = std::pow(spec.x_max / spec.x_min, 1.0 / static_cast<double>(spec.n_cells));
    if (!(r > 1.0 && r <= 4.0)) {
      errors.push_back("grid ratio (x_max/x_min)^(1/n_cells) must be in (1, 4]; got " +
                       std::to_string(r));
    }
  }
  return errors;
}

Grid::Grid(GridSpec spec) : spec_(spec) {
  if (auto errors = validate(spec_); !errors.empty()) {
    std::string msg = "invalid grid:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw ConfigError(msg);
  }
  const std::size_t n = spec_.n_cells;
  ratio_ = std::pow(spec_.x_max / spec_.x_min, 1.0 / static_cast<double>(n));
  edges_.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    edges_[i] = spec_.x_min * std::pow(ratio_, static_cast<double>(i));
  }
  edges_[n] = spec_.x_max;
  pivots_.resize(n);
  widths_.resize(n);
  norm_weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = edges_[i];
    const double b = edges_[i + 1];
    pivots_[i] = spec_.pivot == PivotRule::kMidpoint ? 0.5 * (a + b) : std::sqrt(a * b);
    widths_[i] = b - a;
    norm_weights_[i] = (1.0 + pivots_[i]) * widths_[i];
  }
}

std::shared_ptr<const Grid> Grid::make(GridSpec spec) {
  return std::make_shared<const Grid>(spec);
}

std::optional<std::size_t> Grid::locate(double x) const {
  if (!(x >= edges_.front() && x <= edges_.back())) return std::nullopt;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - edges_.begin());
  return std::min(i == 0 ? 0 : i - 1, size() - 1);
}

Density::Density(std::shared_ptr<const Grid> grid, std::vector<double> values, double t)
    : grid_(std::move(grid)), values_(std::move(values)), t_(t) {
  if (!grid_) throw ContractViolation("density without a grid");
  if (values_.size() != grid_->size()) {
    throw ContractViolation("density has " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_->size()) +
                            " cells");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("density value in cell " + std::to_string(i) + " is not finite");
    }
  }
}

Density Density::zero(std::shared_ptr<const Grid> grid, double t) {
  const std::size_t n = grid->size();
  return Density(std::move(grid), std::vector<double>(n, 0.0), t);
}

std::vector<double> Density::numbers() const {
  std::vector<double> out(values_.size());
  simd::active().mul(values_.data(), grid_->widths().data(), out.data(), out.size());
  return out;
}

Density Density::from_numbers(std::shared_ptr<const Grid> grid,
                              std::span<const double> numbers, double t) {
  std::vector<double> v(numbers.size());
  const auto w = grid->widths();
  if (numbers.size() != w.size()) throw ContractViolation("cell count mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = numbers[i] / w[i];
  return Density(std::move(grid), std::move(v), t);
}

bool Density::nonnegative_within_roundoff() const {
  if (values_.empty()) return true;
  double lo = 0.0;
  double hi = 0.0;
  simd::active().minmax(values_.data(), values_.size(), &lo, &hi);
  return lo >= -1e-12 * std::max(hi, 0.0);
}

void require_same_grid(const Density& a, const Density& b) {
  if (!(a.grid() == b.grid())) throw ContractViolation("densities live on different grids");
}

Density project(const std::function<double(double)>& profile,
                std::shared_ptr<const Grid> grid, const ProjectionOptions& options,
                ProjectionDiagnostics* diagnostics) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  // A depth-d adaptive 15-point rule uses at most 15 * (2^(d+1) - 1) points.
  unsigned depth = 0;
  while (depth < 20 && 15u * ((1u << (depth + 2)) - 1u) <= options.max_evals_per_cell) ++depth;

  const std::size_t n = grid->size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid->lo(i);
    const double b = grid->hi(i);
    double error = 0.0;
    double l1 = 0.0;
    double integral = gauss_kronrod<double, 15>::integrate(profile, a, b, depth,
                                                           options.rel_tol, &error, &l1);
    // Boost floors its error estimate at 128 eps absolute, whatever the cell size.
    if (std::isfinite(integral) && error > options.rel_tol * l1 &&
        error > 256 * std::numeric_limits<double>::epsilon()) {
      std::clog << "coagfrag: warning: projection budget exhausted in cell " << i
                << ", using fixed 15-point rule\n";
      integral = gauss<double, 15>::integrate(profile, a, b);
      if (diagnostics) diagnostics->fallback_cells.push_back(i);
    }
    if (!std::isfinite(integral)) {
      std::ostringstream os;
      os << "profile not integrable on cell " << i << " [" << a << ", " << b << "]";
      throw ProjectionError(os.str());
    }
    values[i] = integral / (b - a);
  }
  return Density(std::move(grid), std::move(values), 0.0);
}

Density monodisperse(std::shared_ptr<const Grid> grid, double size, double number) {
  const auto cell = grid->locate(size);
  if (!cell) throw DomainError("monodisperse size outside the grid");
  std::vector<double> values(grid->size(), 0.0);
  values[*cell] = number / grid->widths()[*cell];
  return Density(std::move(grid), std::move(values), 0.0);
}

double weighted_norm(const Density& d) {
  return simd::weighted_abs_sum(d.grid().norm_weights(), d.values());
}

DensityTable to_table(const Density& d) {
  DensityTable t;
  const auto& g = d.grid();
  for (std::size_t i = 0; i < d.size(); ++i) {
    t.cell_index.push_back(i);
    t.edge_lo.push_back(g.lo(i));
    t.edge_hi.push_back(g.hi(i));
    t.pivot.push_back(g.pivots()[i]);
    t.value.push_back(d.value(i));
  }
  return t;
}

Density remap(const DensityTable& source, std::shared_ptr<const Grid> grid, double t) {
  const std::size_t n = grid->size();
  std::vector<double> numbers(n, 0.0);
  const auto edges = grid->edges();
  for (std::size_t s = 0; s < source.size(); ++s) {
    const double a = source.edge_lo[s];
    const double b = source.edge_hi[s];
    const double v = source.value[s];
    if (!(b > a) || v == 0.0) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), a);
    std::size_t i = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    for (; i < n && grid->lo(i) < b; ++i) {
      const double lo = std::max(a, grid->lo(i));
      const double hi = std::min(b, grid->hi(i));
      if (hi > lo) numbers[i] += v * (hi - lo);
    }
  }
  return Density::from_numbers(std::move(grid), numbers, t);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

void write_density_csv(std::ostream& os, const Density& d) {
  os << "cell_index,edge_lo,edge_hi,pivot,value\n";
  const auto& g = d.grid();
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << i << ',' << format_number(g.lo(i)) << ',' << format_number(g.hi(i)) << ','
       << format_number(g.pivots()[i]) << ',' << format_number(d.value(i)) << '\n';
  }
}

namespace {
// stod throws on subnormals, which legitimately show up in far tails.
double parse_field(const std::string& f) {
  const char* begin = f.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) throw std::invalid_argument(f);
  return v;
}
}  // namespace

DensityTable read_density_csv(std::istream& is) {
  DensityTable t;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw IoError("density CSV is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cell_index,edge_lo,edge_hi,pivot,value") {
    throw IoError("density CSV line 1: expected header "
                  "'cell_index,edge_lo,edge_hi,pivot,value'");
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw IoError("density CSV line " + std::to_string(line_no) + ": expected 5 columns");
    }
    try {
      std::size_t pos = 0;
      const unsigned long idx = std::stoul(fields[0], &pos);
      double vals[4];
      for (int c = 0; c < 4; ++c) vals[c] = parse_field(fields[c + 1]);
      t.cell_index.push_back(idx);
      t.edge_lo.push_back(vals[0]);
      t.edge_hi.push_back(vals[1]);
      t.pivot.push_back(vals[2]);
      t.value.push_back(vals[3]);
    } catch (const std::exception&) {
      throw IoError("density CSV line " + std::to_string(line_no) + ": malformed number");
    }
    if (!(t.edge_hi.back() > t.edge_lo.back())) {
      throw IoError("density CSV line " + std::to_string(line_no) + ": edge_hi <= edge_lo");
    }
  }
  return t;
}

DensityTable read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open density CSV '" + path + "'");
  return read_density_csv(in);
}

}  // namespace coagfrag
