#include "coagfrag/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "coagfrag/errors.hpp"

namespace coagfrag {
namespace {

constexpr std::size_t kMaxWitnesses = 5;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps the worst few violations of one hypothesis.
class WitnessSink {
 public:
  explicit WitnessSink(Hypothesis h) : h_(h) {}

  // severity: larger is worse (lhs/rhs for upper bounds, rhs/lhs for A5).
  void add(double x, double y, double lhs, double rhs, std::size_t index, double severity) {
    ++count_;
    Entry e{{h_, x, y, lhs, rhs, index}, severity};
    if (kept_.size() < kMaxWitnesses) {
      kept_.push_back(e);
      return;
    }
    auto weakest = std::min_element(kept_.begin(), kept_.end(), weaker);
    if (weaker(*weakest, e)) *weakest = e;
  }

  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  void flush(std::vector<Witness>& out) const {
    std::vector<Witness> w;
    for (const auto& e : kept_) w.push_back(e.w);
    std::sort(w.begin(), w.end(),
              [](const Witness& a, const Witness& b) { return a.sample_index < b.sample_index; });
    out.insert(out.end(), w.begin(), w.end());
  }

 private:
  struct Entry {
    Witness w;
    double severity;
  };
  // Ties broken by sample index so the kept set does not depend on order.
  static bool weaker(const Entry& a, const Entry& b) {
    if (a.severity != b.severity) return a.severity < b.severity;
    return a.w.sample_index > b.w.sample_index;
  }

  Hypothesis h_;
  std::size_t count_ = 0;
  std::vector<Entry> kept_;
};

double severity(double big, double small) {
  if (!(small > 0.0)) return kInf;
  return big / small;
}

std::vector<double> sample_sizes(const SamplePlan& plan) {
  std::vector<double> xs(plan.points);
  const double la = std::log(plan.x_min);
  const double lb = std::log(plan.x_max);
  for (std::size_t i = 0; i < plan.points; ++i) {
    const double t = plan.points == 1 ? 0.0
                                      : static_cast<double>(i) /
                                            static_cast<double>(plan.points - 1);
    xs[i] = i + 1 == plan.points ? plan.x_max : std::exp(la + t * (lb - la));
  }
  if (plan.random_points > 0) {
    std::mt19937_64 rng(plan.seed);
    for (std::size_t k = 0; k < plan.random_points; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      xs.push_back(std::exp(la + u * (lb - la)));
    }
  }
  return xs;
}

// Sizes beyond the sample window, for envelopes whose exponent is too
// small to hold asymptotically.
std::vector<double> probe_sizes(const SamplePlan& plan) {
  std::vector<double> xs;
  for (int k = 0; k <= 300; k += 2) {
    const double x = plan.x_max * std::pow(10.0, k);
    if (!std::isfinite(x)) break;
    xs.push_back(x);
  }
  return xs;
}

HypothesisVerdict closed(Hypothesis h, std::string detail) {
  return {h, Verdict::kPass, "closed-form", std::move(detail)};
}

HypothesisVerdict from_samples(Hypothesis h, const WitnessSink& sink, std::size_t checked) {
  std::ostringstream os;
  if (sink.empty()) {
    os << "verified on " << checked << " samples (not a proof)";
    return {h, Verdict::kSampledPass, "samples", os.str()};
  }
  os << sink.count() << " of " << checked << " samples violate the bound";
  return {h, Verdict::kFail, "samples", os.str()};
}

// --- A2 ------------------------------------------------------------------

// Growth exponent per variable, or nullopt for tables.
std::optional<double> kernel_exponent(const CoagulationKernel& k) {
  const auto& p = k.params();
  switch (k.family()) {
    case KernelFamily::kConstant: return 0.0;
    case KernelFamily::kShear: return 7.0 / 9.0;
    case KernelFamily::kModifiedSmoluchowski: return 2.0 / 3.0;
    case KernelFamily::kSumPower: return std::max(p.mu1, p.mu2);
    case KernelFamily::kProductPower: return p.mu1;
    case KernelFamily::kCustomTable: return std::nullopt;
  }
  return std::nullopt;
}

// k1^2 needed with mu = kernel_exponent.
double kernel_prefactor(const CoagulationKernel& k) {
  const auto& p = k.params();
  switch (k.family()) {
    case KernelFamily::kConstant: return p.k0;
    // (x^1/3 + y^1/3)^7/3 <= 2^7/3 max(x,y)^7/9
    case KernelFamily::kShear: return p.k0 * std::pow(2.0, 7.0 / 3.0);
    // (a+b)^2/(ab+c) <= 2a/b + 2b^2/c <= (2 + 2/c)(1+y)^2/3 for a <= b
    case KernelFamily::kModifiedSmoluchowski: return p.k0 * (2.0 + 2.0 / p.c);
    case KernelFamily::kSumPower: return 2.0 * p.k0;
    case KernelFamily::kProductPower: return p.k0;
    case KernelFamily::kCustomTable: return kInf;
  }
  return kInf;
}

// Declared exponents are usually typed as 1 - gamma etc.; differences at
// the rounding level are not treated as a violation.
constexpr double kExponentSlack = 1e-12;

bool a2_dominated(const CoagulationKernel& k, const HypothesisConstants& c) {
  const auto e = kernel_exponent(k);
  return e && c.mu >= *e - kExponentSlack && c.k1 * c.k1 >= kernel_prefactor(k);
}

void sample_a1_a2(const CoagulationKernel& kernel, const HypothesisConstants& c,
                  const std::vector<double>& xs, bool check_a1, WitnessSink& a1,
                  WitnessSink& a2, std::size_t& checked) {
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      ++checked;
      const std::size_t index = i * n + j;
      double lhs = kInf;
      try {
        lhs = kernel(xs[i], xs[j]);
      } catch (const EvaluationError&) {
      }
      if (check_a1) {
        double swapped = kInf;
        try {
          swapped = kernel(xs[j], xs[i]);
        } catch (const EvaluationError&) {
        }
        if (!(lhs >= 0.0) || lhs != swapped) {
          a1.add(xs[i], xs[j], lhs, swapped, index, kInf);
        }
      }
      const double rhs = a2_rhs(c, xs[i], xs[j]);
      if (lhs > rhs) a2.add(xs[i], xs[j], lhs, rhs, index, severity(lhs, rhs));
    }
  }
}

void probe_a2(const CoagulationKernel& kernel, const HypothesisConstants& c,
              const SamplePlan& plan, WitnessSink& a2, std::size_t& checked) {
  const auto big = probe_sizes(plan);
  const double anchors[] = {plan.x_min, 1.0};
  const std::size_t base = plan.points * plan.points;
  std::size_t k = 0;
  for (double y : anchors) {
    for (double x : big) {
      ++checked;
      const std::size_t index = base + k++;
      double lhs;
      try {
        lhs = kernel(x, y);
      } catch (const EvaluationError&) {
        break;
      }
      const double rhs = a2_rhs(c, x, y);
      if (lhs > rhs) a2.add(x, y, lhs, rhs, index, severity(lhs, rhs));
    }
  }
  for (double x : big) {
    ++checked;
    const std::size_t index = base + k++;
    double lhs;
    try {
      lhs = kernel(x, x);
    } catch (const EvaluationError&) {
      break;
    }
    const double rhs = a2_rhs(c, x, x);
    if (lhs > rhs) a2.add(x, x, lhs, rhs, index, severity(lhs, rhs));
  }
}

// --- A4, A5 --------------------------------------------------------------

bool a4_dominated(const FragmentationSpec& f, const HypothesisConstants& c) {
  if (f.family() != RateFamily::kPowerLaw) return false;
  const auto& p = f.params();
  return p.gamma >= 0.0 && p.gamma <= 1.0 - c.lambda + kExponentSlack && c.m >= p.s0;
}

// b(x,y) S(x) = s0 (a+2) y^a x^(g-1-a) >= s0 (a+2) x^(g-1) for a <= 0, y < x,
// and x^(g-1) >= min(1, 2^(1-g)) (1+x)^(g-1) for x >= 1.
bool a5_dominated(const FragmentationSpec& f, const HypothesisConstants& c) {
  if (f.family() != RateFamily::kPowerLaw) return false;
  const auto& p = f.params();
  const double floor = p.s0 * (p.alpha + 2.0) * std::min(1.0, std::pow(2.0, 1.0 - p.gamma));
  return p.alpha <= 0.0 && c.nu <= p.gamma - 1.0 + kExponentSlack && c.L_gamma <= floor;
}

void sample_a4(const FragmentationSpec& f, const HypothesisConstants& c,
               const std::vector<double>& xs, const SamplePlan& plan, bool probe,
               WitnessSink& sink, std::size_t& checked) {
  std::size_t index = 0;
  auto check = [&](double x) {
    ++checked;
    const double lhs = f.rate(x);
    const double rhs = a4_rhs(c, x);
    if (lhs > rhs) sink.add(x, 0.0, lhs, rhs, index, severity(lhs, rhs));
    ++index;
  };
  for (double x : xs) check(x);
  if (probe) {
    for (double x : probe_sizes(plan)) {
      if (!std::isfinite(f.rate(x))) break;
      check(x);
    }
  }
}

void sample_a5(const FragmentationSpec& f, const HypothesisConstants& c,
               const std::vector<double>& xs, const SamplePlan& plan, bool probe,
               WitnessSink& sink, std::size_t& checked) {
  std::vector<double> parents;
  for (double x : xs) {
    if (x >= 1.0) parents.push_back(x);
  }
  if (parents.empty() || parents.front() > 1.0) parents.insert(parents.begin(), 1.0);
  if (probe) {
    for (double x : probe_sizes(plan)) parents.push_back(x);
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const double x = parents[i];
    const double rhs = a5_rhs(c, x);
    for (std::size_t k = 0; k < plan.inner; ++k) {
      ++checked;
      const double y =
          (static_cast<double>(k) + 0.5) / static_cast<double>(plan.inner) * x;
      const double lhs = a5_lhs(f, x, y);
      if (!std::isfinite(lhs) && lhs > 0.0) continue;
      if (lhs < rhs) sink.add(x, y, lhs, rhs, i * plan.inner + k, severity(rhs, lhs));
    }
  }
}

void validate_plan(const SamplePlan& plan) {
  std::vector<std::string> errors;
  if (plan.points == 0) errors.push_back("sample plan is empty (points = 0)");
  else if (plan.points < 1000) errors.push_back("sample plan needs at least 1000 points");
  if (plan.inner == 0) errors.push_back("sample plan needs inner > 0");
  if (!(plan.x_min > 0.0 && plan.x_max > plan.x_min && std::isfinite(plan.x_max))) {
    errors.push_back("sample plan needs 0 < x_min < x_max");
  }
  if (!errors.empty()) {
    std::string msg = "invalid audit sample plan: ";
    for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
    throw ConfigError(msg);
  }
}

}  // namespace

std::string_view to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::kA1: return "A1";
    case Hypothesis::kA2: return "A2";
    case Hypothesis::kA3: return "A3";
    case Hypothesis::kA4: return "A4";
    case Hypothesis::kA5: return "A5";
    case Hypothesis::kUniqueness: return "uniqueness";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kSampledPass: return "sampled-pass";
  }
  return "?";
}

bool AuditReport::all_passed() const {
  return std::none_of(verdicts.begin(), verdicts.end(),
                      [](const HypothesisVerdict& v) { return v.verdict == Verdict::kFail; });
}

double a2_rhs(const HypothesisConstants& c, double x, double y) {
  return (c.k1 * std::pow(1.0 + x, c.mu)) * (c.k1 * std::pow(1.0 + y, c.mu));
}

double a4_rhs(const HypothesisConstants& c, double x) {
  return c.m * std::pow(1.0 + x, 1.0 - c.lambda);
}

double a5_rhs(const HypothesisConstants& c, double x) {
  return c.L_gamma * std::pow(1.0 + x, c.nu);
}

double a5_lhs(const FragmentationSpec& frag, double x, double y) {
  return frag.breakage(x, y) * frag.rate(x);
}

AuditReport audit(const std::optional<CoagulationKernel>& kernel,
                  const std::optional<FragmentationSpec>& fragmentation,
                  const HypothesisConstants& constants, const SamplePlan& plan) {
  validate_plan(plan);
  if (auto errors = validate(constants); !errors.empty()) {
    std::string msg = "invalid hypothesis constants: ";
    for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
    throw ConfigError(msg);
  }
  AuditReport rep;
  rep.constants = constants;
  const auto& c = constants;
  std::vector<double> xs;
  auto samples = [&]() -> const std::vector<double>& {
    if (xs.empty()) xs = sample_sizes(plan);
    return xs;
  };

  // A1, A2
  WitnessSink a1(Hypothesis::kA1);
  WitnessSink a2(Hypothesis::kA2);
  if (!kernel) {
    rep.verdicts[0] = {Hypothesis::kA1, Verdict::kPass, "vacuous", "no coagulation (K = 0)"};
    rep.verdicts[1] = {Hypothesis::kA2, Verdict::kPass, "vacuous", "no coagulation (K = 0)"};
  } else {
    const bool preset = kernel->is_preset();
    const bool a1_closed = preset && !plan.force_sampling;
    const bool a2_closed = !plan.force_sampling && a2_dominated(*kernel, c);
    std::size_t checked = 0;
    if (!a1_closed || !a2_closed) {
      sample_a1_a2(*kernel, c, samples(), !a1_closed, a1, a2, checked);
      if (!a2_closed && a2.empty()) {
        const auto e = kernel_exponent(*kernel);
        if (!e || c.mu < *e - kExponentSlack) probe_a2(*kernel, c, plan, a2, checked);
      }
    }
    rep.verdicts[0] = a1_closed ? closed(Hypothesis::kA1, "preset kernels are symmetric and "
                                                          "non-negative by construction")
                                : from_samples(Hypothesis::kA1, a1, checked);
    if (a2_closed) {
      std::ostringstream os;
      os.precision(17);
      os << "mu >= " << *kernel_exponent(*kernel) << " and k1^2 >= " << kernel_prefactor(*kernel);
      rep.verdicts[1] = closed(Hypothesis::kA2, os.str());
    } else {
      rep.verdicts[1] = from_samples(Hypothesis::kA2, a2, checked);
    }
  }

  // A3, A4, A5
  WitnessSink a4(Hypothesis::kA4);
  WitnessSink a5(Hypothesis::kA5);
  if (!fragmentation) {
    rep.verdicts[2] = {Hypothesis::kA3, Verdict::kPass, "vacuous", "no fragmentation"};
    rep.verdicts[3] = {Hypothesis::kA4, Verdict::kPass, "vacuous", "no fragmentation (S = 0)"};
    a5.add(1.0, 0.5, 0.0, a5_rhs(c, 1.0), 0, kInf);
    rep.verdicts[4] = {Hypothesis::kA5, Verdict::kFail, "closed-form",
                       "no fragmentation: Gamma = 0 cannot be bounded below"};
  } else {
    const auto& f = *fragmentation;
    rep.verdicts[2] = closed(Hypothesis::kA3,
                             "power-law breakage: non-negative, zero for x >= y, N = " +
                                 std::to_string(f.fragment_count()) + ", mass-normalized");
    const bool a4_closed = !plan.force_sampling && a4_dominated(f, c);
    if (a4_closed) {
      rep.verdicts[3] = closed(Hypothesis::kA4, "0 <= gamma <= 1 - lambda and m >= s0");
    } else {
      std::size_t checked = 0;
      const bool probe = f.family() != RateFamily::kPowerLaw ||
                         f.params().gamma > 1.0 - c.lambda + kExponentSlack;
      sample_a4(f, c, samples(), plan, probe, a4, checked);
      rep.verdicts[3] = from_samples(Hypothesis::kA4, a4, checked);
    }
    const bool a5_closed = !plan.force_sampling && a5_dominated(f, c);
    if (a5_closed) {
      rep.verdicts[4] = closed(Hypothesis::kA5,
                               "alpha <= 0, nu <= gamma - 1, L_gamma <= s0 (alpha+2) "
                               "min(1, 2^(1-gamma))");
    } else {
      std::size_t checked = 0;
      const bool probe = f.family() != RateFamily::kPowerLaw || f.params().gamma - 1.0 + kExponentSlack < c.nu;
      sample_a5(f, c, samples(), plan, probe, a5, checked);
      rep.verdicts[4] = from_samples(Hypothesis::kA5, a5, checked);
    }
  }

  // 1 + nu > mu
  {
    std::ostringstream os;
    os.precision(17);
    os << "1 + nu = " << 1.0 + c.nu << ", mu = " << c.mu;
    const bool ok = 1.0 + c.nu > c.mu;
    rep.verdicts[5] = {Hypothesis::kUniqueness, ok ? Verdict::kPass : Verdict::kFail,
                       "comparison", os.str()};
    if (!ok) rep.witnesses.push_back({Hypothesis::kUniqueness, 0.0, 0.0, c.mu, 1.0 + c.nu, 0});
  }

  std::vector<Witness> ordered;
  a1.flush(ordered);
  a2.flush(ordered);
  a4.flush(ordered);
  a5.flush(ordered);
  ordered.insert(ordered.end(), rep.witnesses.begin(), rep.witnesses.end());
  rep.witnesses = std::move(ordered);
  return rep;
}

CoagulationConstants suggest_coagulation_constants(const CoagulationKernel& kernel) {
  const auto e = kernel_exponent(kernel);
  if (!e) {
    throw UnsupportedError("no closed-form constants for custom-table kernels; declare k1 and mu");
  }
  if (*e >= 1.0) {
    std::ostringstream os;
    os << to_string(kernel.family()) << " kernel grows like x^" << *e
       << " per variable; no envelope with mu < 1 exists";
    throw UnsupportedError(os.str());
  }
  const double k1sq = kernel_prefactor(kernel);
  // k1 must be > 0 even for the zero kernel.
  return {k1sq > 0.0 ? std::sqrt(k1sq) : 1.0, *e};
}

FragmentationConstants suggest_fragmentation_constants(const FragmentationSpec& frag) {
  if (frag.family() != RateFamily::kPowerLaw) {
    throw UnsupportedError("no closed-form constants for custom fragmentation rates; declare "
                           "m, lambda, L_gamma and nu");
  }
  const auto& p = frag.params();
  if (!(p.gamma > 0.0 && p.gamma < 1.0 && p.alpha <= 0.0)) {
    throw UnsupportedError(
        "closed-form constants need 0 < gamma < 1 and -1 < alpha <= 0; declare them instead");
  }
  return {p.s0, 1.0 - p.gamma, p.s0 * (p.alpha + 2.0), p.gamma - 1.0};
}

HypothesisConstants suggest_constants(const CoagulationKernel& kernel,
                                      const FragmentationSpec& frag) {
  const auto kc = suggest_coagulation_constants(kernel);
  const auto fc = suggest_fragmentation_constants(frag);
  return {kc.k1, kc.mu, fc.m, fc.lambda, fc.L_gamma, fc.nu};
}

}  // namespace coagfrag
