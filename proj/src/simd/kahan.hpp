#pragma once

namespace coagfrag::simd::detail {

// Kahan compensated accumulator. Relies on strict IEEE evaluation
// (the project builds with -fno-fast-math -ffp-contract=off).
struct Kahan {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }

  // Folds another accumulator's (sum, compensation) pair.
  void merge(double other_sum, double other_comp) {
    add(other_sum);
    add(-other_comp);
  }

  double value() const { return s; }
};

}  // namespace coagfrag::simd::detail
