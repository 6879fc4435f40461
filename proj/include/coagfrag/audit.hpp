#pragma once

// Checks a kernel configuration against the well-posedness hypotheses
//   A1  K >= 0, symmetric
//   A2  K(x,y) <= k1^2 (1+x)^mu (1+y)^mu
//   A3  Gamma >= 0 with the support condition, N finite, b mass-normalized
//   A4  S(x) <= m (1+x)^(1-lambda)
//   A5  b(x,y) S(x) >= L_gamma (1+x)^nu for x >= 1, 0 < y < x
// and the uniqueness condition 1 + nu > mu.
//
// Presets are decided in closed form whenever the declared constants
// dominate the family's envelope. Otherwise the envelope is sampled on a
// log grid; a clean sample run is reported as "sampled-pass", never "pass".

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coagfrag/kernels.hpp"

namespace coagfrag {

enum class Hypothesis { kA1, kA2, kA3, kA4, kA5, kUniqueness };
inline constexpr std::size_t kHypothesisCount = 6;

std::string_view to_string(Hypothesis h);

enum class Verdict { kPass, kFail, kSampledPass };
std::string_view to_string(Verdict v);

struct SamplePlan {
  double x_min = 1e-6;
  double x_max = 1e6;
  std::size_t points = 4096;  // log-spaced, per axis
  std::size_t inner = 64;     // y quantiles of (0, x) for A5
  std::size_t random_points = 0;
  std::uint64_t seed = 0;
  // Skip closed-form dominance and always sample (used to cross-check the
  // closed forms).
  bool force_sampling = false;

  bool operator==(const SamplePlan&) const = default;
};

struct Witness {
  Hypothesis hypothesis;
  double x = 0.0;
  double y = 0.0;  // unused (0) for A4 and the uniqueness condition
  double lhs = 0.0;
  double rhs = 0.0;
  std::size_t sample_index = 0;
};

struct HypothesisVerdict {
  Hypothesis hypothesis;
  Verdict verdict = Verdict::kPass;
  std::string basis;   // "closed-form", "samples", "comparison", "vacuous"
  std::string detail;
};

struct AuditReport {
  std::array<HypothesisVerdict, kHypothesisCount> verdicts;
  HypothesisConstants constants;
  std::vector<Witness> witnesses;  // sorted by hypothesis, then sample index

  const HypothesisVerdict& operator[](Hypothesis h) const {
    return verdicts[static_cast<std::size_t>(h)];
  }
  bool passed(Hypothesis h) const { return (*this)[h].verdict != Verdict::kFail; }
  bool all_passed() const;
};

// The exact expressions the audit compares; a witness satisfies
// lhs > rhs (A2, A4) or lhs < rhs (A5) with these.
double a2_rhs(const HypothesisConstants& c, double x, double y);
double a4_rhs(const HypothesisConstants& c, double x);
double a5_rhs(const HypothesisConstants& c, double x);
double a5_lhs(const FragmentationSpec& frag, double x, double y);

/// Absent kernel means K = 0; absent fragmentation means S = 0.
/// Throws ConfigError for an empty or too coarse sample plan.
AuditReport audit(const std::optional<CoagulationKernel>& kernel,
                  const std::optional<FragmentationSpec>& fragmentation,
                  const HypothesisConstants& constants, const SamplePlan& plan = {});

struct CoagulationConstants {
  double k1 = 1.0;
  double mu = 0.0;
};

struct FragmentationConstants {
  double m = 1.0;
  double lambda = 0.5;
  double L_gamma = 1.0;
  double nu = 0.0;
};

/// Closed-form constants for presets. UnsupportedError for custom families
/// and for presets outside the admissible range (e.g. mu >= 1).
CoagulationConstants suggest_coagulation_constants(const CoagulationKernel& kernel);
FragmentationConstants suggest_fragmentation_constants(const FragmentationSpec& frag);
HypothesisConstants suggest_constants(const CoagulationKernel& kernel,
                                      const FragmentationSpec& frag);

}  // namespace coagfrag
