#include "coagfrag/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coagfrag/errors.hpp"
#include "coagfrag/simd/kernels.hpp"

namespace coagfrag {
namespace {

bool identically_zero(const CoagulationKernel& k) {
  return k.family() == KernelFamily::kConstant && k.params().k0 == 0.0;
}

// Compensated scatter-add target.
struct KahanVector {
  std::vector<double> sum;
  std::vector<double> comp;

  void reset(std::size_t n) {
    sum.assign(n, 0.0);
    comp.assign(n, 0.0);
  }
  void add(std::size_t i, double x) {
    const double y = x - comp[i];
    const double t = sum[i] + y;
    comp[i] = (t - sum[i]) - y;
    sum[i] = t;
  }
};

struct KahanScalar {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

struct Scratch {
  KahanVector birth;
  std::vector<double> tmp;
  std::vector<double> frag_source;
  std::vector<double> loss;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

std::string_view to_string(TruncationMode mode) {
  return mode == TruncationMode::kConservative ? "conservative" : "classical";
}

TruncationMode parse_truncation_mode(std::string_view name) {
  if (name == "conservative") return TruncationMode::kConservative;
  if (name == "classical") return TruncationMode::kClassical;
  throw ConfigError("unknown truncation mode '" + std::string(name) +
                    "' (expected conservative or classical)");
}

std::string_view to_string(DustPolicy policy) {
  return policy == DustPolicy::kRemove ? "remove" : "lump";
}

DustPolicy parse_dust_policy(std::string_view name) {
  if (name == "remove") return DustPolicy::kRemove;
  if (name == "lump") return DustPolicy::kLump;
  throw ConfigError("unknown dust policy '" + std::string(name) + "' (expected remove or lump)");
}

std::size_t OperatorTables::estimate_bytes(std::size_t n, bool coagulation, bool fragmentation) {
  std::size_t bytes = 8 * n * sizeof(double);
  if (coagulation) bytes += n * n * sizeof(double) + (n * (n + 1) / 2) * sizeof(PairTarget);
  if (fragmentation) bytes += n * n * sizeof(double);
  return bytes;
}

OperatorTables::OperatorTables(std::optional<CoagulationKernel> kernel,
                               std::optional<FragmentationSpec> fragmentation,
                               std::shared_ptr<const Grid> grid, AssemblyOptions options)
    : kernel_(std::move(kernel)),
      fragmentation_(std::move(fragmentation)),
      grid_(std::move(grid)),
      options_(options),
      n_(grid_->size()) {
  if (kernel_ && identically_zero(*kernel_)) kernel_.reset();

  const std::size_t bytes = estimate_bytes(n_, kernel_.has_value(), fragmentation_.has_value());
  if (bytes > options_.max_table_bytes) {
    throw AssemblyError("operator tables need " + std::to_string(bytes) +
                        " bytes, above the budget of " +
                        std::to_string(options_.max_table_bytes) +
                        "; use a coarser grid (fewer n_cells)");
  }

  const auto p = grid_->pivots();
  const double x_max = grid_->spec().x_max;
  pivot_weights_.assign(p.begin(), p.end());

  if (kernel_) {
    kmat_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = (*kernel_)(p[i], p[j]);
        kmat_[i * n_ + j] = k;
        kmat_[j * n_ + i] = k;
      }
    }
    inside_end_.assign(n_, 0);
    row_offset_.assign(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t end = 0;
      while (end < n_ && p[i] + p[end] <= x_max) ++end;
      inside_end_[i] = end;
      row_offset_[i + 1] = row_offset_[i] + (end > i ? end - i : 0);
    }
    pairs_.resize(row_offset_[n_]);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < inside_end_[i]; ++j) {
        const double s = p[i] + p[j];
        const auto it = std::upper_bound(p.begin(), p.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - p.begin()) - 1;
        PairTarget t{static_cast<std::uint32_t>(k), 0.0, 0.0};
        if (k + 1 == n_) {
          t.to_lower = s / p[k];
        } else {
          const double h = p[k + 1] - p[k];
          t.to_lower = (p[k + 1] - s) / h;
          t.to_upper = (s - p[k]) / h;
        }
        pairs_[row_offset_[i] + (j - i)] = t;
      }
    }
  }

  if (fragmentation_) {
    const auto& frag = *fragmentation_;
    const double e0 = grid_->lo(0);
    rates_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) rates_[i] = frag.rate(p[i]);
    fmat_.assign(n_ * n_, 0.0);
    dust_mass_.assign(n_, 0.0);
    dust_number_.assign(n_, 0.0);
    frag_defect_.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double y = p[j];
      for (std::size_t i = 0; i < j; ++i) {
        const double a = p[i];
        const double b = p[i + 1];
        const double num = frag.partial_number(y, a, b);
        const double mass = frag.partial_mass(y, a, b);
        const double h = b - a;
        fmat_[i * n_ + j] += (b * num - mass) / h;
        fmat_[(i + 1) * n_ + j] += (mass - a * num) / h;
      }
      // Fragments between the lowest edge and the lowest pivot.
      const double num_low = frag.partial_number(y, e0, p[0]);
      const double mass_low = frag.partial_mass(y, e0, p[0]);
      fmat_[j] += mass_low / p[0];
      frag_defect_[j] += num_low - mass_low / p[0];
      // Fragments below the grid.
      const double num_dust = frag.partial_number(y, 0.0, e0);
      const double mass_dust = frag.partial_mass(y, 0.0, e0);
      if (options_.dust == DustPolicy::kRemove) {
        dust_mass_[j] = mass_dust;
        dust_number_[j] = num_dust;
      } else {
        fmat_[j] += mass_dust / p[0];
        frag_defect_[j] += num_dust - mass_dust / p[0];
      }
    }
  }
}

double OperatorTables::death_weight(std::size_t i, std::size_t j) const {
  if (!kernel_) return 0.0;
  const bool counted = options_.truncation == TruncationMode::kClassical || j < inside_end_[i];
  return counted ? kmat_[i * n_ + j] * grid_->widths()[j] : 0.0;
}

double OperatorTables::evaluate(std::span<const double> numbers, std::span<double> out) const {
  if (numbers.size() < n_ || out.size() < state_size()) {
    throw ContractViolation("state vector shorter than the grid");
  }
  const auto& kt = simd::active();
  Scratch& sc = scratch();
  sc.loss.assign(n_, 0.0);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(state_size()), 0.0);
  const double* nv = numbers.data();

  if (kernel_) {
    sc.birth.reset(n_);
    sc.tmp.resize(n_);
    KahanScalar overflow;
    KahanScalar defect;
    const bool classical = options_.truncation == TruncationMode::kClassical;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* krow = kmat_.data() + i * n_;
      const std::size_t end = inside_end_[i];
      const double inside = kt.dot(krow, nv, end);
      const double outside = classical ? kt.dot(krow + end, nv + end, n_ - end) : 0.0;
      sc.loss[i] = inside + outside;
      const double ni = nv[i];
      if (ni == 0.0) continue;
      out[i] = -ni * (inside + outside);
      if (classical) overflow.add(pivot_weights_[i] * ni * outside);
      if (end <= i) continue;
      const std::size_t len = end - i;
      kt.mul(krow + i, nv + i, sc.tmp.data(), len);
      const PairTarget* row = pairs_.data() + row_offset_[i];
      for (std::size_t q = 0; q < len; ++q) {
        double r = ni * sc.tmp[q];
        if (q == 0) r *= 0.5;
        if (r == 0.0) continue;
        const PairTarget& t = row[q];
        sc.birth.add(t.cell, t.to_lower * r);
        if (t.to_upper != 0.0) {
          sc.birth.add(t.cell + 1, t.to_upper * r);
        } else if (t.cell + 1 == n_) {
          defect.add((1.0 - t.to_lower) * r);
        }
      }
    }
    for (std::size_t i = 0; i < n_; ++i) out[i] = sc.birth.sum[i] + out[i];
    out[n_ + kAuxOverflowMass] = overflow.s;
    out[n_ + kAuxNumberDefect] = defect.s;
  }

  if (fragmentation_) {
    sc.frag_source.resize(n_);
    kt.mul(rates_.data(), nv, sc.frag_source.data(), n_);
    const double* g = sc.frag_source.data();
    for (std::size_t i = 0; i < n_; ++i) {
      const double born = kt.dot(fmat_.data() + i * n_ + i, g + i, n_ - i);
      out[i] = out[i] + (born - g[i]);
      sc.loss[i] += rates_[i];
    }
    out[n_ + kAuxDustMass] = kt.dot(dust_mass_.data(), g, n_);
    out[n_ + kAuxDustNumber] = kt.dot(dust_number_.data(), g, n_);
    out[n_ + kAuxNumberDefect] += kt.dot(frag_defect_.data(), g, n_);
  }

  double lo = 0.0;
  double hi = 0.0;
  kt.minmax(sc.loss.data(), n_, &lo, &hi);
  return hi;
}

std::shared_ptr<const OperatorTables> assemble(std::optional<CoagulationKernel> kernel,
                                               std::optional<FragmentationSpec> fragmentation,
                                               std::shared_ptr<const Grid> grid,
                                               AssemblyOptions options) {
  return std::make_shared<const OperatorTables>(std::move(kernel), std::move(fragmentation),
                                                std::move(grid), options);
}

DensityRate rhs(const OperatorTables& tables, const Density& d) {
  if (!(d.grid() == tables.grid())) {
    throw ContractViolation("density and operator tables use different grids");
  }
  const auto numbers = d.numbers();
  std::vector<double> out(tables.state_size());
  tables.evaluate(numbers, out);
  DensityRate r;
  r.grid = tables.grid_ptr();
  const auto w = tables.grid().widths();
  r.values.resize(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) r.values[i] = out[i] / w[i];
  const std::size_t n = tables.size();
  r.overflow_mass_rate = out[n + kAuxOverflowMass];
  r.dust_mass_rate = out[n + kAuxDustMass];
  r.dust_number_rate = out[n + kAuxDustNumber];
  r.number_defect_rate = out[n + kAuxNumberDefect];
  return r;
}

}  // namespace coagfrag
