#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "warpcap/conditions.hpp"
#include "warpcap/geometry.hpp"

namespace warpcap {

// Radial vector field X = x(r) d/dr.  pole_flux is the declared limit of
// x * A at the inner end of the profile's domain: 0 for fields defined (and
// vanishing) at the pole, the boundary flux for exterior fields whose domain
// starts at a positive radius.
struct RadialField {
  RadialProfile x;
  double pole_flux = 0.0;
};

// div X = x' + x A'/A (right-sided at profile joints).
double div_radial(const ModelGeometry& g, const RadialField& field, double r);
std::pair<double, double> div_radial_one_sided(const ModelGeometry& g, const RadialField& field,
                                               double r);

// Flux of X through the sphere of radius R: x(R) A(R).
double flux(const ModelGeometry& g, const RadialField& field, double R);

// int_{B_R} div X dV, two routes: the calculus identity flux(R) - pole_flux,
// and direct quadrature of div X over the ball.
double ball_divergence_integral(const ModelGeometry& g, const RadialField& field, double R);
double ball_divergence_integral_quadrature(const ModelGeometry& g, const RadialField& field,
                                           double R, const QuadratureConfig& cfg = {});

// Behaviour of the flux x(R) A(R) as R -> inf, certified from the concrete
// final segments of x and h.  Uncertified (nullopt) when either final
// behaviour is tabulated without analytic form, or the warping carries a
// declared oscillating tail.
struct FluxLimit {
  double value = 0.0;      // meaningful when !infinite
  bool infinite = false;
  int sign = 0;            // sign of the divergent flux
};
std::optional<FluxLimit> flux_limit(const ModelGeometry& g, const RadialField& field);

// int (div X)_- dV: finiteness decided from the final segments, the value
// estimated by quadrature up to the analyzed tail.  nullopt when uncertified.
struct NegativePart {
  bool finite = false;
  double value = 0.0;      // meaningful when finite
};
std::optional<NegativePart> negative_divergence_part(const ModelGeometry& g,
                                                     const RadialField& field);

// Field with prescribed divergence: div X = d pointwise, x = (int_0^r d A)/A.
// The density d must vanish identically beyond a finite radius; the field
// continues past the support with x = (total mass)/A.  With normalize_to set
// the density is rescaled so the total mass hits that value exactly.  A
// running mass within quadrature resolution of zero (relative to the total
// absolute mass moved) snaps to exactly zero, so balanced densities yield
// honestly compactly supported fields.
RadialField field_from_divergence(const ModelGeometry& g, const RadialProfile& density,
                                  std::optional<double> normalize_to = {});

// Compactly supported C^1 bump on [lo, hi], max 1 at the midpoint.
RadialProfile smooth_bump(double lo, double hi, int nodes_per_piece = 33);

// Piecewise profile of scale / A(t) on [from, inf), built analytically from
// the warping segments.
RadialProfile reciprocal_area_profile(const ModelGeometry& g, double from, double scale);

// Exterior field x = 1/A on [base_radius, inf): unit flux through every
// sphere, divergence zero -- the gradient field |grad f|^{p-2} grad f of the
// radial potential, for every p.
RadialField unit_flux_field(const ModelGeometry& g);

// |X| or |X|^q profile of a field, for the condition checkers.
RadialDensity field_density(const RadialField& field, RadialDensity::Meaning meaning,
                            std::optional<Exponent> e = {});

// Randomized divergence-prescribed fields for soundness sweeps: 1-3 disjoint
// smooth bumps with random signed masses; even-indexed fields are balanced
// (total mass 0), odd ones are not.
std::vector<RadialField> random_bump_fields(const ModelGeometry& g, int count, uint64_t seed);

struct StokesReport {
  std::vector<double> radii;
  std::vector<double> ball_integrals;   // quadrature route
  std::vector<double> fluxes;           // x(R) A(R)
  std::vector<double> residuals;        // |quadrature - (flux - pole_flux)|
  bool residuals_ok = false;

  ConditionReport condition;

  std::optional<NegativePart> negative_part;

  enum class Conclusion { vanishes, nonzero, inconclusive };
  Conclusion conclusion = Conclusion::inconclusive;
  std::optional<double> limit_value;    // certified lim int_{B_R} div X dV
  bool limit_infinite = false;
  int limit_sign = 0;

  // supported condition + integrable negative part + certified nonzero limit
  // would contradict the vanishing theorem
  bool inconsistent = false;
  std::string note;
};

struct HarnessOptions {
  ConditionThresholds thresholds{};
  GapFunction gap;                  // default: doubling windows
  double residual_tol = 1e-6;       // relative to 1 + |flux|
  double vanish_tol = 1e-9;         // relative to 1 + max |flux|
};

// Full verification pass for one field: both ball-integral routes with
// residuals, the chosen sufficient condition along the ladder, negative-part
// integrability, and the certified conclusion about lim int div X.
// For the energy_level_set condition the radii are interpreted as potential
// levels.
StokesReport theorem_harness(const ModelGeometry& g, const Exponent& e,
                             const RadialField& field, ConditionKind condition,
                             std::span<const double> radii, const HarnessOptions& options = {});

}  // namespace warpcap
