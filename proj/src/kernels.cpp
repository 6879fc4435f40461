#include "coagfrag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coagfrag/errors.hpp"

namespace coagfrag {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string pair_text(double x, double y) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x << ", " << y << ")";
  return os.str();
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Locates u in an ascending axis; returns cell index and fraction in [0,1].
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double u) {
  const std::size_t n = axis.size();
  if (u <= axis.front()) return {0, 0.0};
  if (u >= axis.back()) return {n - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
  return {i, (u - axis[i]) / (axis[i + 1] - axis[i])};
}

void validate_axis(const std::vector<double>& sizes, const char* what,
                   std::vector<std::string>& errors) {
  if (sizes.size() < 2) {
    errors.push_back(std::string(what) + " needs at least 2 sizes");
    return;
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(std::isfinite(sizes[i]) && sizes[i] > 0.0)) {
      errors.push_back(std::string(what) + " sizes must be finite and > 0");
      return;
    }
    if (i > 0 && !(sizes[i] > sizes[i - 1])) {
      errors.push_back(std::string(what) + " sizes must be strictly increasing");
      return;
    }
  }
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kConstant: return "constant";
    case KernelFamily::kShear: return "shear";
    case KernelFamily::kModifiedSmoluchowski: return "smoluchowski-modified";
    case KernelFamily::kSumPower: return "sum-power";
    case KernelFamily::kProductPower: return "product-power";
    case KernelFamily::kCustomTable: return "custom-table";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (auto f : {KernelFamily::kConstant, KernelFamily::kShear,
                 KernelFamily::kModifiedSmoluchowski, KernelFamily::kSumPower,
                 KernelFamily::kProductPower, KernelFamily::kCustomTable}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown kernel family '" + std::string(name) +
                    "' (expected constant, shear, smoluchowski-modified, sum-power, "
                    "product-power, custom-table)");
}

std::vector<std::string> validate(const CoagulationParams& p) {
  std::vector<std::string> errors;
  if (!finite_nonneg(p.k0)) errors.push_back("k0 must be finite and >= 0");
  switch (p.family) {
    case KernelFamily::kModifiedSmoluchowski:
      if (!(std::isfinite(p.c) && p.c > 0.0)) errors.push_back("c must be > 0");
      break;
    case KernelFamily::kSumPower:
      if (!finite_nonneg(p.mu1)) errors.push_back("mu1 must be finite and >= 0");
      if (!finite_nonneg(p.mu2)) errors.push_back("mu2 must be finite and >= 0");
      break;
    case KernelFamily::kProductPower:
      if (!finite_nonneg(p.mu1)) errors.push_back("mu1 must be finite and >= 0");
      if (!finite_nonneg(p.mu2)) errors.push_back("mu2 must be finite and >= 0");
      if (p.mu1 != p.mu2) {
        errors.push_back("product-power requires mu1 == mu2 (kernel must be symmetric)");
      }
      break;
    case KernelFamily::kCustomTable: {
      validate_axis(p.table_sizes, "kernel table", errors);
      const std::size_t n = p.table_sizes.size();
      if (p.table_values.size() != n * n) {
        errors.push_back("kernel table values must be a full " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix");
        break;
      }
      bool nonneg = true;
      bool symmetric = true;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double v = p.table_values[i * n + j];
          nonneg = nonneg && finite_nonneg(v);
          symmetric = symmetric && v == p.table_values[j * n + i];
        }
      }
      if (!nonneg) errors.push_back("kernel table values must be finite and >= 0");
      if (!symmetric) errors.push_back("kernel table must be symmetric");
      break;
    }
    default:
      break;
  }
  return errors;
}

CoagulationKernel::CoagulationKernel(CoagulationParams params) : params_(std::move(params)) {
  if (auto errors = validate(params_); !errors.empty()) {
    throw ConfigError("invalid coagulation kernel: " + join(errors));
  }
  if (params_.family == KernelFamily::kCustomTable) {
    const std::size_t n = params_.table_sizes.size();
    log_sizes_.reserve(n);
    for (double s : params_.table_sizes) log_sizes_.push_back(std::log(s));
    packed_.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) packed_.push_back(params_.table_values[i * n + j]);
    }
  }
}

CoagulationKernel CoagulationKernel::constant(double k0) {
  CoagulationParams p;
  p.family = KernelFamily::kConstant;
  p.k0 = k0;
  return CoagulationKernel(p);
}
CoagulationKernel CoagulationKernel::shear(double k0) {
  CoagulationParams p;
  p.family = KernelFamily::kShear;
  p.k0 = k0;
  return CoagulationKernel(p);
}
CoagulationKernel CoagulationKernel::modified_smoluchowski(double k0, double c) {
  CoagulationParams p;
  p.family = KernelFamily::kModifiedSmoluchowski;
  p.k0 = k0;
  p.c = c;
  return CoagulationKernel(p);
}
CoagulationKernel CoagulationKernel::sum_power(double k0, double mu1, double mu2) {
  CoagulationParams p;
  p.family = KernelFamily::kSumPower;
  p.k0 = k0;
  p.mu1 = mu1;
  p.mu2 = mu2;
  return CoagulationKernel(p);
}
CoagulationKernel CoagulationKernel::product_power(double k0, double mu1, double mu2) {
  CoagulationParams p;
  p.family = KernelFamily::kProductPower;
  p.k0 = k0;
  p.mu1 = mu1;
  p.mu2 = mu2;
  return CoagulationKernel(p);
}
CoagulationKernel CoagulationKernel::custom_table(std::vector<double> sizes,
                                                  std::vector<double> values) {
  CoagulationParams p;
  p.family = KernelFamily::kCustomTable;
  p.k0 = 1.0;
  p.table_sizes = std::move(sizes);
  p.table_values = std::move(values);
  return CoagulationKernel(p);
}

double CoagulationKernel::table_lookup(double lo, double hi) const {
  const std::size_t n = log_sizes_.size();
  const auto at = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return packed_[i * n - i * (i - 1) / 2 + (j - i)];
  };
  const auto [i, tx] = locate(log_sizes_, std::log(lo));
  const auto [j, ty] = locate(log_sizes_, std::log(hi));
  // nested lerps reproduce a constant table exactly
  const double r0 = at(i, j) + tx * (at(i + 1, j) - at(i, j));
  const double r1 = at(i, j + 1) + tx * (at(i + 1, j + 1) - at(i, j + 1));
  return r0 + ty * (r1 - r0);
}

double CoagulationKernel::raw(double lo, double hi) const {
  const double k0 = params_.k0;
  switch (params_.family) {
    case KernelFamily::kConstant:
      return k0;
    case KernelFamily::kShear:
      return k0 * std::pow(std::cbrt(lo) + std::cbrt(hi), 7.0 / 3.0);
    case KernelFamily::kModifiedSmoluchowski: {
      const double a = std::cbrt(lo);
      const double b = std::cbrt(hi);
      return k0 * (a + b) * (a + b) / (a * b + params_.c);
    }
    case KernelFamily::kSumPower:
      return k0 * (std::pow(lo, params_.mu1) * std::pow(hi, params_.mu2) +
                   std::pow(lo, params_.mu2) * std::pow(hi, params_.mu1));
    case KernelFamily::kProductPower:
      return k0 * std::pow(lo, params_.mu1) * std::pow(hi, params_.mu2);
    case KernelFamily::kCustomTable:
      return table_lookup(lo, hi);
  }
  return 0.0;
}

double CoagulationKernel::operator()(double x, double y) const {
  if (!(x > 0.0 && y > 0.0)) {
    throw DomainError("kernel evaluated at non-positive size pair " + pair_text(x, y));
  }
  const double v = x <= y ? raw(x, y) : raw(y, x);
  if (!std::isfinite(v)) {
    throw EvaluationError("kernel value not finite at " + pair_text(x, y));
  }
  return v;
}

std::string_view to_string(RateFamily family) {
  switch (family) {
    case RateFamily::kPowerLaw: return "powerlaw-frag";
    case RateFamily::kCustom: return "custom";
  }
  return "unknown";
}

RateFamily parse_rate_family(std::string_view name) {
  if (name == "powerlaw-frag") return RateFamily::kPowerLaw;
  if (name == "custom") return RateFamily::kCustom;
  throw ConfigError("unknown fragmentation family '" + std::string(name) +
                    "' (expected powerlaw-frag or custom)");
}

std::vector<std::string> validate(const FragmentationParams& p) {
  std::vector<std::string> errors;
  if (!std::isfinite(p.alpha) || !(p.alpha > -1.0)) {
    errors.push_back("alpha must be > -1 (fragment count diverges otherwise)");
  }
  if (p.family == RateFamily::kPowerLaw) {
    if (!std::isfinite(p.gamma)) errors.push_back("gamma must be finite");
    if (!(std::isfinite(p.s0) && p.s0 > 0.0)) errors.push_back("s0 must be finite and > 0");
  } else {
    validate_axis(p.rate_sizes, "rate table", errors);
    if (p.rate_values.size() != p.rate_sizes.size()) {
      errors.push_back("rate table needs one value per size");
    } else if (!std::all_of(p.rate_values.begin(), p.rate_values.end(), finite_nonneg)) {
      errors.push_back("rate table values must be finite and >= 0");
    }
  }
  return errors;
}

FragmentationSpec::FragmentationSpec(FragmentationParams params) : params_(std::move(params)) {
  if (auto errors = validate(params_); !errors.empty()) {
    throw ConfigError("invalid fragmentation: " + join(errors));
  }
  if (params_.family == RateFamily::kCustom) {
    for (double s : params_.rate_sizes) log_sizes_.push_back(std::log(s));
  }
}

FragmentationSpec FragmentationSpec::power_law(double gamma, double alpha, double s0) {
  FragmentationParams p;
  p.family = RateFamily::kPowerLaw;
  p.gamma = gamma;
  p.alpha = alpha;
  p.s0 = s0;
  return FragmentationSpec(p);
}

double FragmentationSpec::rate(double y) const {
  if (y < 0.0 || std::isnan(y)) throw DomainError("fragmentation rate at negative size");
  if (params_.family == RateFamily::kCustom) {
    if (y == 0.0) return params_.rate_values.front();
    const auto [i, t] = locate(log_sizes_, std::log(y));
    return (1.0 - t) * params_.rate_values[i] + t * params_.rate_values[i + 1];
  }
  if (y == 0.0 && params_.gamma < 0.0) {
    throw DomainError("fragmentation rate singular at the origin (gamma < 0)");
  }
  return params_.s0 * std::pow(y, params_.gamma);
}

double FragmentationSpec::breakage(double y, double x) const {
  if (!(y > 0.0)) throw DomainError("breakage needs a positive parent size");
  if (!(x > 0.0)) throw DomainError("breakage needs a positive fragment size");
  if (x >= y) return 0.0;
  const double a = params_.alpha;
  return (a + 2.0) / y * std::pow(x / y, a);
}

double FragmentationSpec::fragment_count() const {
  return (params_.alpha + 2.0) / (params_.alpha + 1.0);
}

void FragmentationSpec::check_interval(double y, double a, double b_hi) const {
  if (!(y > 0.0 && a >= 0.0 && a <= b_hi && b_hi <= y)) {
    std::ostringstream os;
    os.precision(17);
    os << "breakage interval [" << a << ", " << b_hi << "] outside [0, " << y << "]";
    throw DomainError(os.str());
  }
}

double FragmentationSpec::partial_number(double y, double a, double b_hi) const {
  check_interval(y, a, b_hi);
  const double e = params_.alpha + 1.0;
  return fragment_count() * (std::pow(b_hi / y, e) - std::pow(a / y, e));
}

double FragmentationSpec::partial_mass(double y, double a, double b_hi) const {
  check_interval(y, a, b_hi);
  const double e = params_.alpha + 2.0;
  return y * (std::pow(b_hi / y, e) - std::pow(a / y, e));
}

std::vector<std::string> validate(const HypothesisConstants& c) {
  std::vector<std::string> errors;
  if (!(std::isfinite(c.k1) && c.k1 > 0.0)) errors.push_back("k1 must be > 0");
  if (!(c.mu >= 0.0 && c.mu < 1.0)) errors.push_back("mu must be in [0, 1)");
  if (!(std::isfinite(c.m) && c.m > 0.0)) errors.push_back("m must be > 0");
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) errors.push_back("lambda must be in (0, 1)");
  if (!(std::isfinite(c.L_gamma) && c.L_gamma > 0.0)) errors.push_back("L_gamma must be > 0");
  if (!(std::isfinite(c.nu) && c.nu > -1.0)) errors.push_back("nu must be > -1");
  return errors;
}

}  // namespace coagfrag
