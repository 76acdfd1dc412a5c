#pragma once

#include <optional>
#include <string>

#include "warpcap/geometry.hpp"

namespace warpcap {

// Constant in front of the volume-kernel capacity bound.
enum class VolumeBoundConstant { two_to_p, p };

struct CapacityBounds {
  double exact_model = 0.0;     // (int_{r1}^{r2} a_p)^{1-p}
  double surface_bound = 0.0;   // same expression; general upper bound
  double volume_bound = 0.0;    // K * (int_{r1}^{r2} b_p)^{1-p}
  VolumeBoundConstant constant = VolumeBoundConstant::two_to_p;
  double tightness_surface = 0.0;  // exact / surface
  double tightness_volume = 0.0;   // exact / volume
};

// p-capacity of the annulus B_{r2} \ B_{r1} in a model manifold, where the
// radial equilibrium potential makes the surface-kernel expression exact.
double cap_exact_model(const ModelGeometry& g, const Exponent& e, double r1, double r2);

// Surface-kernel upper bound (int a_p)^{1-p}; on models it coincides with
// cap_exact_model by construction.
double cap_upper_surface(const ModelGeometry& g, const Exponent& e, double r1, double r2);

// Volume-kernel upper bound K (int b_p)^{1-p} with K = 2^p (general) or
// K = p (sharper variant).
double cap_upper_volume(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                        VolumeBoundConstant constant = VolumeBoundConstant::two_to_p);

CapacityBounds capacity_bounds(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                               VolumeBoundConstant constant = VolumeBoundConstant::two_to_p);

// p-parabolicity of a model manifold, decided through the tail of the
// surface kernel: divergent integral <=> parabolic.
struct ParabolicityVerdict {
  enum class Kind { parabolic, non_parabolic, undetermined };

  Kind kind = Kind::undetermined;
  // non-parabolic: int_base^inf a_p (reciprocal of the base ball's capacity)
  std::optional<double> potential_limit;
  // parabolic: the divergent tail model of a_p
  std::optional<TailModel> divergent_tail;
  std::string description;
};

ParabolicityVerdict classify_parabolicity(const ModelGeometry& g, const Exponent& e);

}  // namespace warpcap
