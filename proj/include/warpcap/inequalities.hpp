#pragma once

#include <cstdint>
#include <span>

namespace warpcap {

// Comparison weight for the vector inequality: |x-y|^p when p >= 2,
// |x-y|^2 / (|x| + |y|)^{2-p} when 1 < p < 2 (0 at x = y = 0 by limit).
double psi(std::span<const double> x, std::span<const double> y, double p);

// <|x|^{p-2} x - |y|^{p-2} y, x - y>, the monotone p-power pairing
// (|0|^{p-2} 0 is read as 0 for p < 2).
double lindqvist_lhs(std::span<const double> x, std::span<const double> y, double p);

// Empirical lower constant C(p) with lindqvist_lhs >= 2 C(p) psi: infimum of
// the ratio over seeded Gaussian pairs plus a deterministic adversarial
// family (antipodal pairs, nearly equal parallel pairs, axis pairs) that
// pins the known minimizing configurations.
struct CpEstimate {
  double value = 0.0;
  double p = 2.0;
  int dimension = 1;
  int sample_count = 0;
  uint64_t seed = 0;
};
CpEstimate estimate_cp(double p, int dimension, int sample_count, uint64_t seed);

// Weight bound used for the negative part of the comparison field:
//   (2 t / (A + t)^{3/2}) * (du_p + dv_p)  <=  (2 / sqrt(A)) * (du_p + dv_p)
// for t >= 0, A > 1.  Returns whether the inequality holds.
bool negative_part_bound(double du_p, double dv_p, double t, double A);

// Maximum of the weight t -> 2 t / (A + t)^{3/2} over t > 0: coarse
// golden-section localization refined by a sign bisection of the analytic
// derivative (the value is too flat near the top for comparisons alone).
// increasing_below reports strict growth along a grid of (0, argmax).
struct WeightMaximum {
  double argmax = 0.0;
  double value = 0.0;
  bool increasing_below = false;
};
WeightMaximum weight_maximum(double A);

}  // namespace warpcap
