#include <atomic>
#include <cassert>
#include <stdexcept>
#include <string>

#include "coagfrag/simd/kernels.hpp"

namespace coagfrag::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(best_level())};
  return slot;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
    case Level::kNeon: return "neon";
  }
  return "unknown";
}

Level parse_level(std::string_view name) {
  if (name == "scalar") return Level::kScalar;
  if (name == "avx2") return Level::kAvx2;
  if (name == "neon") return Level::kNeon;
  if (name == "auto") return best_level();
  throw std::invalid_argument("unknown SIMD level '" + std::string(name) +
                              "' (expected scalar, avx2, neon or auto)");
}

bool is_available(Level level) {
  switch (level) {
    case Level::kScalar: return true;
    case Level::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return cpu_has_avx2();
#else
      return false;
#endif
    case Level::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Level> available_levels() {
  std::vector<Level> out{Level::kScalar};
  for (Level l : {Level::kAvx2, Level::kNeon}) {
    if (is_available(l)) out.push_back(l);
  }
  return out;
}

Level best_level() { return available_levels().back(); }

const KernelTable& table(Level level) {
  if (!is_available(level)) {
    throw std::invalid_argument("SIMD level '" + std::string(level_name(level)) +
                                "' is not available on this CPU/build");
  }
  switch (level) {
#if defined(__x86_64__) || defined(_M_X64)
    case Level::kAvx2: return detail::avx2_table();
#endif
#if defined(__aarch64__)
    case Level::kNeon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void select(Level level) { active_slot().store(&table(level), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double weighted_abs_sum(std::span<const double> w, std::span<const double> a) {
  assert(w.size() == a.size());
  return active().weighted_abs_sum(w.data(), a.data(), a.size());
}

double weighted_abs_diff(std::span<const double> w, std::span<const double> a,
                         std::span<const double> b) {
  assert(w.size() == a.size() && a.size() == b.size());
  return active().weighted_abs_diff(w.data(), a.data(), b.data(), a.size());
}

}  // namespace coagfrag::simd
