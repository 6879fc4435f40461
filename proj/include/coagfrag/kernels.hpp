#pragma once

// Coagulation kernels K(x,y), fragmentation rates S(y), breakage densities
// b(y,x), and the envelope constants the well-posedness hypotheses are
// stated in. Sizes are dimensionless volumes; all objects are immutable
// after construction and safe to evaluate concurrently.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coagfrag {

enum class KernelFamily {
  kConstant,
  kShear,
  kModifiedSmoluchowski,
  kSumPower,
  kProductPower,
  kCustomTable,
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct CoagulationParams {
  KernelFamily family = KernelFamily::kConstant;
  double k0 = 1.0;
  double c = 1.0;     // modified Smoluchowski regularizer
  double mu1 = 0.0;   // power families
  double mu2 = 0.0;
  // custom-table: ascending sizes and a full symmetric matrix, row-major.
  std::vector<double> table_sizes;
  std::vector<double> table_values;

  bool operator==(const CoagulationParams&) const = default;
};

/// Every constraint the parameters violate (empty if valid).
std::vector<std::string> validate(const CoagulationParams& params);

class CoagulationKernel {
 public:
  /// Throws ConfigError listing every violated constraint.
  explicit CoagulationKernel(CoagulationParams params);

  static CoagulationKernel constant(double k0);
  static CoagulationKernel shear(double k0);
  static CoagulationKernel modified_smoluchowski(double k0, double c);
  static CoagulationKernel sum_power(double k0, double mu1, double mu2);
  static CoagulationKernel product_power(double k0, double mu1, double mu2);
  static CoagulationKernel custom_table(std::vector<double> sizes,
                                        std::vector<double> values);

  KernelFamily family() const { return params_.family; }
  const CoagulationParams& params() const { return params_; }
  bool is_preset() const { return params_.family != KernelFamily::kCustomTable; }

  /// K(x,y) for x,y > 0. Arguments are put in canonical order before
  /// evaluation so the result is bitwise symmetric.
  /// Throws DomainError for non-positive sizes and EvaluationError when the
  /// value is not finite.
  double operator()(double x, double y) const;

 private:
  double raw(double lo, double hi) const;
  double table_lookup(double lo, double hi) const;

  CoagulationParams params_;
  std::vector<double> log_sizes_;
  std::vector<double> packed_;  // upper triangle, row-major
};

inline double eval_K(const CoagulationKernel& kernel, double x, double y) {
  return kernel(x, y);
}

enum class RateFamily { kPowerLaw, kCustom };

std::string_view to_string(RateFamily family);
RateFamily parse_rate_family(std::string_view name);

/// Fragmentation rate S(y) = s0 * y^gamma (or a tabulated rate) with the
/// power-law breakage density b(y,x) = (alpha+2)/y * (x/y)^alpha, 0 < x < y.
struct FragmentationParams {
  RateFamily family = RateFamily::kPowerLaw;
  double gamma = 1.0;
  double alpha = 0.0;
  double s0 = 1.0;
  // custom: rate sampled at ascending sizes, linear in log(size), clamped.
  std::vector<double> rate_sizes;
  std::vector<double> rate_values;

  bool operator==(const FragmentationParams&) const = default;
};

std::vector<std::string> validate(const FragmentationParams& params);

class FragmentationSpec {
 public:
  /// Rejects alpha <= -1 (infinitely many fragments) and invalid rates.
  explicit FragmentationSpec(FragmentationParams params);

  static FragmentationSpec power_law(double gamma, double alpha, double s0 = 1.0);

  const FragmentationParams& params() const { return params_; }
  RateFamily family() const { return params_.family; }
  double alpha() const { return params_.alpha; }
  bool is_preset() const { return params_.family == RateFamily::kPowerLaw; }

  /// S(y). Throws DomainError for y < 0, or y == 0 when S is singular there.
  double rate(double y) const;

  /// b(y,x): (alpha+2) x^alpha / y^(alpha+1) for 0 < x < y, and 0 for x >= y.
  double breakage(double y, double x) const;

  /// N = (alpha+2)/(alpha+1), the expected number of fragments.
  double fragment_count() const;

  /// Number of fragments with size in [a, b_hi] from a parent of size y.
  double partial_number(double y, double a, double b_hi) const;

  /// Mass integral of x*b(y,x) over [a, b_hi] in closed form:
  /// (b_hi^(alpha+2) - a^(alpha+2)) / y^(alpha+1). Requires 0 <= a <= b_hi <= y.
  double partial_mass(double y, double a, double b_hi) const;

 private:
  void check_interval(double y, double a, double b_hi) const;

  FragmentationParams params_;
  std::vector<double> log_sizes_;
};

inline double eval_S(const FragmentationSpec& frag, double y) { return frag.rate(y); }
inline double eval_b(const FragmentationSpec& frag, double y, double x) {
  return frag.breakage(y, x);
}
inline double fragment_count(const FragmentationSpec& frag) { return frag.fragment_count(); }
inline double breakage_partial_mass(const FragmentationSpec& frag, double y, double a,
                                    double b_hi) {
  return frag.partial_mass(y, a, b_hi);
}

/// Envelope constants of the hypotheses:
///   K(x,y) <= k1^2 (1+x)^mu (1+y)^mu,  0 <= mu < 1
///   S(x)   <= m (1+x)^(1-lambda),       0 < lambda < 1
///   b(x,y) S(x) >= L_gamma (1+x)^nu     for x >= 1, 0 < y < x, nu > -1
/// The two constants written m and m_1 for the rate bound are one constant m.
struct HypothesisConstants {
  double k1 = 1.0;
  double mu = 0.0;
  double m = 1.0;
  double lambda = 0.5;
  double L_gamma = 1.0;
  double nu = 0.0;

  bool operator==(const HypothesisConstants&) const = default;
};

std::vector<std::string> validate(const HypothesisConstants& consts);

}  // namespace coagfrag
