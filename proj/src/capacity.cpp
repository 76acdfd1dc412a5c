#include "warpcap/capacity.hpp"

#include <cmath>

namespace warpcap {

double cap_exact_model(const ModelGeometry& g, const Exponent& e, double r1, double r2) {
  return std::pow(ap_integral(g, e, r1, r2), 1.0 - e.p);
}

double cap_upper_surface(const ModelGeometry& g, const Exponent& e, double r1, double r2) {
  // identical expression; the radial equilibrium potential saturates it
  return cap_exact_model(g, e, r1, r2);
}

double cap_upper_volume(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                        VolumeBoundConstant constant) {
  if (!(0.0 < r1 && r1 < r2) || !std::isfinite(r2))
    throw DomainError("cap_upper_volume: need 0 < r1 < r2 < inf");
  const double K = constant == VolumeBoundConstant::two_to_p ? std::pow(2.0, e.p) : e.p;
  const double I =
      integrate_strict([&](double t) { return g.b_p(e, r1, t); }, r1, r2, g.quad_config(),
                       g.hints_in(r1, r2));
  return K * std::pow(I, 1.0 - e.p);
}

CapacityBounds capacity_bounds(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                               VolumeBoundConstant constant) {
  CapacityBounds out;
  out.exact_model = cap_exact_model(g, e, r1, r2);
  out.surface_bound = cap_upper_surface(g, e, r1, r2);
  out.volume_bound = cap_upper_volume(g, e, r1, r2, constant);
  out.constant = constant;
  out.tightness_surface = out.exact_model / out.surface_bound;
  out.tightness_volume = out.exact_model / out.volume_bound;
  return out;
}

ParabolicityVerdict classify_parabolicity(const ModelGeometry& g, const Exponent& e) {
  ParabolicityVerdict out;
  const auto tail = g.a_p_tail(e);
  if (!tail) {
    out.kind = ParabolicityVerdict::Kind::undetermined;
    out.description =
        "the warping tail cannot be classified (tabulated final data, no declared tail)";
    return out;
  }
  switch (classify_tail_integral(*tail)) {
    case TailVerdict::diverges: {
      out.kind = ParabolicityVerdict::Kind::parabolic;
      out.divergent_tail = *tail;
      out.description = "parabolic: the surface kernel a_p has divergent tail integral (a_p " +
                        tail->describe() + "), so annulus capacities to infinity vanish";
      break;
    }
    case TailVerdict::converges: {
      EvansPotential f(g, e);
      out.kind = ParabolicityVerdict::Kind::non_parabolic;
      out.potential_limit = f.limit_at_infinity().value;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.12g", out.potential_limit.value_or(0.0));
      out.description =
          std::string("non-parabolic: int_base^inf a_p = ") + buf +
          " is finite; its (1-p)-th power is the positive capacity of the base ball";
      break;
    }
    case TailVerdict::undetermined: {
      out.kind = ParabolicityVerdict::Kind::undetermined;
      out.description =
          "undetermined: the oscillation envelopes of a_p straddle the integrability threshold";
      break;
    }
  }
  return out;
}

}  // namespace warpcap
