#pragma once

// Sectional discretization of the coagulation and multiple-fragmentation
// right-hand side on a geometric grid.
//
// Internally the state is the particle count per cell, n_i = v_i * width_i,
// concentrated at the pivot p_i. Newly formed particles of size s (a
// coagulation product p_i + p_j, or a fragment) are shared between the two
// pivots bracketing s with weights that preserve both number and mass.
// Products above the last pivot are lumped into the last cell preserving
// mass only; the signed number change is reported as "number defect".

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coagfrag/grid.hpp"
#include "coagfrag/kernels.hpp"

namespace coagfrag {

enum class TruncationMode {
  // Pairs whose product exceeds x_max are dropped from birth AND death:
  // mass is conserved on the truncated domain.
  kConservative,
  // Such pairs still die; their mass leaves as overflow flux.
  kClassical,
};

std::string_view to_string(TruncationMode mode);
TruncationMode parse_truncation_mode(std::string_view name);

enum class DustPolicy {
  kRemove,  // fragments below x_min leave the system as dust flux
  kLump,    // fragments below x_min are added to cell 0 (mass-preserving)
};

std::string_view to_string(DustPolicy policy);
DustPolicy parse_dust_policy(std::string_view name);

struct AssemblyOptions {
  TruncationMode truncation = TruncationMode::kConservative;
  DustPolicy dust = DustPolicy::kRemove;
  std::size_t max_table_bytes = std::size_t{1} << 30;

  bool operator==(const AssemblyOptions&) const = default;
};

/// Layout of the auxiliary entries that follow the n cell entries in a
/// state or rate vector.
enum Aux : std::size_t {
  kAuxOverflowMass = 0,
  kAuxDustMass = 1,
  kAuxDustNumber = 2,
  kAuxNumberDefect = 3,
  kAuxCount = 4,
};

struct PairTarget {
  std::uint32_t cell;  // lower target cell
  double to_lower;     // particles deposited at `cell` per collision
  double to_upper;     // particles deposited at `cell + 1` per collision
};

class OperatorTables {
 public:
  /// Throws AssemblyError when the tables would exceed max_table_bytes.
  OperatorTables(std::optional<CoagulationKernel> kernel,
                 std::optional<FragmentationSpec> fragmentation,
                 std::shared_ptr<const Grid> grid, AssemblyOptions options = {});

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const AssemblyOptions& options() const { return options_; }
  std::size_t size() const { return n_; }
  std::size_t state_size() const { return n_ + kAuxCount; }
  bool has_coagulation() const { return kernel_.has_value(); }
  bool has_fragmentation() const { return fragmentation_.has_value(); }
  const std::optional<CoagulationKernel>& kernel() const { return kernel_; }
  const std::optional<FragmentationSpec>& fragmentation() const { return fragmentation_; }

  static std::size_t estimate_bytes(std::size_t n_cells, bool coagulation, bool fragmentation);

  // --- coagulation -------------------------------------------------------
  double kernel_at(std::size_t i, std::size_t j) const { return kmat_[i * n_ + j]; }
  /// Per-unit-density death rate weight D_ij = K(p_i,p_j) * width_j.
  double death_weight(std::size_t i, std::size_t j) const;
  /// Partners j < inside_end(i) form products inside [.., x_max].
  std::size_t inside_end(std::size_t i) const { return inside_end_[i]; }
  /// Deposit rule for the unordered pair i <= j < inside_end(i).
  const PairTarget& pair_target(std::size_t i, std::size_t j) const {
    return pairs_[row_offset_[i] + (j - i)];
  }

  // --- fragmentation -----------------------------------------------------
  double rate_at(std::size_t i) const { return rates_[i]; }
  /// Particles deposited at pivot i per breakage event of a parent at pivot j.
  double fragments(std::size_t i, std::size_t j) const { return fmat_[i * n_ + j]; }
  /// Birth table B_{j,i} = S(p_j) * fragments(i, j).
  double birth_weight(std::size_t j, std::size_t i) const { return rates_[j] * fragments(i, j); }
  double dust_mass(std::size_t j) const { return dust_mass_[j]; }
  double dust_number(std::size_t j) const { return dust_number_[j]; }
  double fragment_number_defect(std::size_t j) const { return frag_defect_[j]; }

  /// Evaluates d(state)/dt for a state of particle counts plus aux entries.
  /// `out` has state_size() entries. Returns the largest per-particle loss
  /// rate over cells (coagulation partners plus S), used as the positivity
  /// guard of the stepper.
  double evaluate(std::span<const double> numbers, std::span<double> out) const;

 private:
  std::optional<CoagulationKernel> kernel_;
  std::optional<FragmentationSpec> fragmentation_;
  std::shared_ptr<const Grid> grid_;
  AssemblyOptions options_;
  std::size_t n_;

  std::vector<double> kmat_;
  std::vector<std::size_t> inside_end_;
  std::vector<std::size_t> row_offset_;
  std::vector<PairTarget> pairs_;
  std::vector<double> pivot_weights_;  // p_i, for overflow mass

  std::vector<double> rates_;
  std::vector<double> fmat_;
  std::vector<double> dust_mass_;
  std::vector<double> dust_number_;
  std::vector<double> frag_defect_;
};

std::shared_ptr<const OperatorTables> assemble(std::optional<CoagulationKernel> kernel,
                                               std::optional<FragmentationSpec> fragmentation,
                                               std::shared_ptr<const Grid> grid,
                                               AssemblyOptions options = {});

/// dv_i/dt plus the aux flux rates.
struct DensityRate {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;
  double overflow_mass_rate = 0.0;
  double dust_mass_rate = 0.0;
  double dust_number_rate = 0.0;
  double number_defect_rate = 0.0;
};

/// Throws ContractViolation if the density is on a different grid.
DensityRate rhs(const OperatorTables& tables, const Density& d);

}  // namespace coagfrag
