#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpcap/geometry.hpp"

namespace warpcap {

// Sufficient conditions for the vanishing of a total divergence, each probed
// along a radius ladder:
//   annulus_kernel    int_R^{R+g} |X|^q dV  /  int_R^{R+g} a_p
//   volume_growth     int_R^{R+g} |X|^q dV  /  int_R^{R+g} (t/V(t))^{1/(p-1)} dt
//   energy_level_set  (1/r) (int_{C(r)} |grad f|^p dV)^{1/p}
//                           (int_{C(r)} |X|^q dV)^{(p-1)/p},  C(r) = f^{-1}[r, r+g)
//   mass_average      (1/R) int_R^{R+g} |X| dV
// The condition holds when the ratios have vanishing inferior limit.
enum class ConditionKind { annulus_kernel, volume_growth, energy_level_set, mass_average };

enum class ConditionVerdict { supported, violated, inconclusive };

const char* to_string(ConditionKind kind);
const char* to_string(ConditionVerdict verdict);

// Radial density |X| or |X|^q of a vector field's magnitude.
struct RadialDensity {
  enum class Meaning { abs_field, q_power };
  RadialProfile profile;
  Meaning meaning = Meaning::abs_field;
};

// Width of the window attached to radius R (window is [R, R + gap(R))).
using GapFunction = std::function<double(double)>;

// Optional absolute overrides; by default thresholds are relative to the
// first positive ratio: support = 1e-3 x, violation = 1e-1 x.
struct ConditionThresholds {
  std::optional<double> support;
  std::optional<double> violation;
};

struct ConditionReport {
  ConditionKind condition = ConditionKind::mass_average;
  std::vector<double> tested_radii;
  std::vector<double> ratios;
  double achieved_inf = 0.0;
  ConditionVerdict verdict = ConditionVerdict::inconclusive;
  double support_threshold = 0.0;
  double violation_threshold = 0.0;
  double trend_slope = 0.0;            // Theil-Sen slope of log ratio vs log R
  std::string gap_description;
  bool closed_form_gradient = false;   // energy factor taken from the potential increment
  std::string note;                    // qualifiers (partial data, finite evidence)
};

ConditionReport check_annulus_kernel(const ModelGeometry& g, const Exponent& e,
                                     const RadialDensity& density, const GapFunction& gap,
                                     std::span<const double> radii,
                                     const ConditionThresholds& thresholds = {},
                                     std::string gap_description = "g(R) = R");

ConditionReport check_volume_growth(const ModelGeometry& g, const Exponent& e,
                                    const RadialDensity& density, const GapFunction& gap,
                                    std::span<const double> radii,
                                    const ConditionThresholds& thresholds = {},
                                    std::string gap_description = "g(R) = R");

// Levels r are values of the exhaustion potential, not radii.
ConditionReport check_energy_level_set(const EvansPotential& f, const RadialDensity& density,
                                       const GapFunction& gap, std::span<const double> levels,
                                       const ConditionThresholds& thresholds = {},
                                       std::string gap_description = "g(r) = r");

ConditionReport check_mass_average(const ModelGeometry& g, const RadialDensity& density,
                                   const GapFunction& gap, std::span<const double> radii,
                                   const ConditionThresholds& thresholds = {},
                                   std::string gap_description = "g(R) = R");

// The default window: [R, 2R].
GapFunction doubling_gap();

}  // namespace warpcap
