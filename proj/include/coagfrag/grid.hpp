#pragma once

// Geometric size grid and cell-averaged number densities.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coagfrag {

enum class PivotRule { kMidpoint, kGeometric };

std::string_view to_string(PivotRule rule);
PivotRule parse_pivot_rule(std::string_view name);

struct GridSpec {
  double x_min = 1e-3;
  double x_max = 1e3;
  std::size_t n_cells = 256;
  PivotRule pivot = PivotRule::kMidpoint;

  bool operator==(const GridSpec&) const = default;
};

std::vector<std::string> validate(const GridSpec& spec);

/// Edges e_i = x_min r^i, r = (x_max/x_min)^(1/n). Immutable; share it
/// through std::shared_ptr<const Grid>.
class Grid {
 public:
  /// Throws ConfigError when the spec is invalid (n < 8, ratio outside (1,4]).
  explicit Grid(GridSpec spec);

  static std::shared_ptr<const Grid> make(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return pivots_.size(); }
  double ratio() const { return ratio_; }

  std::span<const double> edges() const { return edges_; }
  std::span<const double> pivots() const { return pivots_; }
  std::span<const double> widths() const { return widths_; }
  /// (1 + p_i) * width_i: the weights of the weighted norm.
  std::span<const double> norm_weights() const { return norm_weights_; }

  double lo(std::size_t i) const { return edges_[i]; }
  double hi(std::size_t i) const { return edges_[i + 1]; }

  /// Cell containing x (half-open cells, last cell closed), if inside.
  std::optional<std::size_t> locate(double x) const;

  bool operator==(const Grid& other) const { return spec_ == other.spec_; }

 private:
  GridSpec spec_;
  double ratio_;
  std::vector<double> edges_;
  std::vector<double> pivots_;
  std::vector<double> widths_;
  std::vector<double> norm_weights_;
};

/// Cell averages v_i of a number density f(., t) on a grid.
class Density {
 public:
  /// Throws ContractViolation on size mismatch, DomainError on non-finite values.
  Density(std::shared_ptr<const Grid> grid, std::vector<double> values, double t = 0.0);

  static Density zero(std::shared_ptr<const Grid> grid, double t = 0.0);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  double time() const { return t_; }
  std::size_t size() const { return values_.size(); }

  /// Particle count per cell, v_i * width_i.
  std::vector<double> numbers() const;
  static Density from_numbers(std::shared_ptr<const Grid> grid,
                              std::span<const double> numbers, double t);

  /// v_i >= -1e-12 * max_i v_i for every cell.
  bool nonnegative_within_roundoff() const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
  double t_;
};

/// Throws ContractViolation unless both densities live on equal grids.
void require_same_grid(const Density& a, const Density& b);

struct ProjectionOptions {
  double rel_tol = 1e-10;
  // Evaluation budget per cell for the adaptive rule; beyond it the cell
  // falls back to a fixed 15-point Gauss rule.
  std::size_t max_evals_per_cell = 1000;
};

struct ProjectionDiagnostics {
  std::vector<std::size_t> fallback_cells;
};

/// v_i = (1/width_i) * integral of profile over cell i (adaptive Gauss-Kronrod).
/// Throws ProjectionError naming the cell if the integral is not finite.
Density project(const std::function<double(double)>& profile,
                std::shared_ptr<const Grid> grid, const ProjectionOptions& options = {},
                ProjectionDiagnostics* diagnostics = nullptr);

/// All particles of total count `number` in the cell containing `size`.
Density monodisperse(std::shared_ptr<const Grid> grid, double size, double number);

/// Sum_i (1 + p_i) |v_i| width_i.
double weighted_norm(const Density& d);

/// Piecewise-constant density given by arbitrary cells (edges need not match
/// any Grid), e.g. read back from CSV.
struct DensityTable {
  std::vector<std::size_t> cell_index;
  std::vector<double> edge_lo;
  std::vector<double> edge_hi;
  std::vector<double> pivot;
  std::vector<double> value;

  std::size_t size() const { return value.size(); }
};

DensityTable to_table(const Density& d);

/// Number-conserving overlap remap of a piecewise-constant density onto a grid.
/// Mass outside the grid's [x_min, x_max] is dropped.
Density remap(const DensityTable& source, std::shared_ptr<const Grid> grid, double t = 0.0);

/// CSV header: cell_index,edge_lo,edge_hi,pivot,value.
void write_density_csv(std::ostream& os, const Density& d);
/// Throws IoError with the offending line number on malformed input.
DensityTable read_density_csv(std::istream& is);
DensityTable read_density_csv(const std::string& path);

/// Fixed-width scientific formatting with 17 significant digits.
std::string format_number(double x);

}  // namespace coagfrag
