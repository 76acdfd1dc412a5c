#include "warpcap/conditions.hpp"

#include <algorithm>
#include <cmath>

namespace warpcap {

const char* to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::annulus_kernel:
      return "annulus_kernel";
    case ConditionKind::volume_growth:
      return "volume_growth";
    case ConditionKind::energy_level_set:
      return "energy_level_set";
    case ConditionKind::mass_average:
      return "mass_average";
  }
  return "?";
}

const char* to_string(ConditionVerdict verdict) {
  switch (verdict) {
    case ConditionVerdict::supported:
      return "supported";
    case ConditionVerdict::violated:
      return "violated";
    case ConditionVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

GapFunction doubling_gap() {
  return [](double r) { return r; };
}

namespace {

// Median pairwise slope of y against x (robust trend estimate).
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> slopes;
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
  if (slopes.empty()) return 0.0;
  const size_t mid = slopes.size() / 2;
  std::nth_element(slopes.begin(), slopes.begin() + mid, slopes.end());
  double m = slopes[mid];
  if (slopes.size() % 2 == 0) {
    std::nth_element(slopes.begin(), slopes.begin() + mid - 1, slopes.end());
    m = 0.5 * (m + slopes[mid - 1]);
  }
  return m;
}

void finish_report(ConditionReport& rep, const ConditionThresholds& thresholds) {
  const auto& ratios = rep.ratios;
  if (ratios.empty()) {
    rep.verdict = ConditionVerdict::inconclusive;
    if (rep.note.empty()) rep.note = "no ratios could be computed";
    return;
  }
  rep.achieved_inf = *std::min_element(ratios.begin(), ratios.end());

  double reference = 0.0;
  for (double v : ratios)
    if (v > 0.0) {
      reference = v;
      break;
    }
  const bool all_zero = reference == 0.0;
  rep.support_threshold = thresholds.support.value_or(1e-3 * reference);
  rep.violation_threshold = thresholds.violation.value_or(1e-1 * reference);

  std::vector<double> lx, ly;
  for (size_t i = 0; i < ratios.size(); ++i) {
    lx.push_back(std::log(rep.tested_radii[i]));
    ly.push_back(std::log(std::max(ratios[i], 1e-300)));
  }
  rep.trend_slope = theil_sen_slope(lx, ly);

  const bool hits_zero =
      std::any_of(ratios.begin(), ratios.end(), [](double v) { return v == 0.0; });
  const size_t half = ratios.size() / 2;
  const double tail_min = *std::min_element(ratios.begin() + half, ratios.end());

  if (all_zero) {
    rep.verdict = ConditionVerdict::supported;
  } else if (rep.achieved_inf <= rep.support_threshold &&
             (rep.trend_slope < 0.0 || hits_zero)) {
    rep.verdict = ConditionVerdict::supported;
  } else if (tail_min >= rep.violation_threshold) {
    rep.verdict = ConditionVerdict::violated;
  } else {
    rep.verdict = ConditionVerdict::inconclusive;
  }
  if (rep.note.empty())
    rep.note = "evidence over the tested radii only; the condition itself is asymptotic";
}

void require_meaning(const RadialDensity& density, RadialDensity::Meaning expected,
                     const char* who) {
  if (density.meaning != expected)
    throw DomainError(std::string(who) + ": density carries the wrong meaning ("
                      "expected " +
                      (expected == RadialDensity::Meaning::q_power ? "|X|^q" : "|X|") + ")");
}

void require_radii(std::span<const double> radii) {
  if (radii.size() < 2) throw DomainError("condition check: need at least two radii");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw DomainError("condition check: radii must be sorted ascending");
  if (!(radii.front() > 0.0)) throw DomainError("condition check: radii must be positive");
}

// int_a^b density * A with merged hints
double density_mass(const ModelGeometry& g, const RadialProfile& dens, double a, double b) {
  std::vector<double> hints = dens.hints_in(a, b);
  auto gh = g.hints_in(a, b);
  hints.insert(hints.end(), gh.begin(), gh.end());
  std::sort(hints.begin(), hints.end());
  hints.erase(std::unique(hints.begin(), hints.end()), hints.end());
  return integrate_strict([&](double t) { return dens.value(t) * g.area(t); }, a, b,
                          g.quad_config(), hints);
}

// Recoverable per-radius failures (quadrature trouble, levels escaping the
// potential's range) truncate the ladder; anything else is a caller error.
struct PartialStop : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename RatioFn>
ConditionReport run_ladder(ConditionKind kind, std::span<const double> radii,
                           const ConditionThresholds& thresholds, std::string gap_description,
                           RatioFn&& ratio_at) {
  ConditionReport rep;
  rep.condition = kind;
  rep.gap_description = std::move(gap_description);
  for (double r : radii) {
    try {
      const double ratio = ratio_at(r);
      rep.tested_radii.push_back(r);
      rep.ratios.push_back(ratio);
    } catch (const QuadratureError& ex) {
      rep.note = std::string("partial data: quadrature failed at radius ") +
                 std::to_string(r) + " (" + ex.what() + ")";
      break;
    } catch (const PartialStop& ex) {
      rep.note = std::string("partial data: stopped at radius ") + std::to_string(r) + " (" +
                 ex.what() + ")";
      break;
    }
  }
  const bool partial = rep.tested_radii.size() < radii.size();
  finish_report(rep, thresholds);
  if (partial) rep.verdict = ConditionVerdict::inconclusive;
  return rep;
}

double checked_gap(const GapFunction& gap, double r) {
  const double w = gap(r);
  if (!(w > 0.0) || !std::isfinite(w))
    throw DomainError("condition check: gap function must return positive finite widths");
  return w;
}

}  // namespace

ConditionReport check_annulus_kernel(const ModelGeometry& g, const Exponent& e,
                                     const RadialDensity& density, const GapFunction& gap,
                                     std::span<const double> radii,
                                     const ConditionThresholds& thresholds,
                                     std::string gap_description) {
  require_meaning(density, RadialDensity::Meaning::q_power, "check_annulus_kernel");
  require_radii(radii);
  return run_ladder(ConditionKind::annulus_kernel, radii, thresholds,
                    std::move(gap_description), [&](double r) {
                      const double b = r + checked_gap(gap, r);
                      const double mass = density_mass(g, density.profile, r, b);
                      const double kernel = ap_integral(g, e, r, b);
                      return mass / kernel;
                    });
}

ConditionReport check_volume_growth(const ModelGeometry& g, const Exponent& e,
                                    const RadialDensity& density, const GapFunction& gap,
                                    std::span<const double> radii,
                                    const ConditionThresholds& thresholds,
                                    std::string gap_description) {
  require_meaning(density, RadialDensity::Meaning::q_power, "check_volume_growth");
  require_radii(radii);
  const double s = 1.0 / (e.p - 1.0);
  return run_ladder(ConditionKind::volume_growth, radii, thresholds, std::move(gap_description),
                    [&, s](double r) {
                      const double b = r + checked_gap(gap, r);
                      const double mass = density_mass(g, density.profile, r, b);
                      const double denom = integrate_strict(
                          [&](double t) { return std::pow(t / g.volume(t), s); }, r, b,
                          g.quad_config(), g.hints_in(r, b));
                      return mass / denom;
                    });
}

ConditionReport check_energy_level_set(const EvansPotential& f, const RadialDensity& density,
                                       const GapFunction& gap, std::span<const double> levels,
                                       const ConditionThresholds& thresholds,
                                       std::string gap_description) {
  require_meaning(density, RadialDensity::Meaning::q_power, "check_energy_level_set");
  require_radii(levels);
  const ModelGeometry& g = f.geometry();
  const Exponent& e = f.exponent();
  ConditionReport rep = run_ladder(
      ConditionKind::energy_level_set, levels, thresholds, std::move(gap_description),
      [&](double r) {
        const double upper = r + checked_gap(gap, r);
        const auto s1 = f.inverse(r);
        const auto s2 = f.inverse(upper);
        if (!s1 || !s2)
          throw PartialStop("level set escapes the potential's range (not an exhaustion here)");
        // int_{C(r)} |grad f|^p dV telescopes to the potential increment
        const double grad_energy = upper - r;
        const double mass = density_mass(g, density.profile, *s1, *s2);
        return (1.0 / r) * std::pow(grad_energy, 1.0 / e.p) *
               std::pow(mass, (e.p - 1.0) / e.p);
      });
  rep.closed_form_gradient = true;
  return rep;
}

ConditionReport check_mass_average(const ModelGeometry& g, const RadialDensity& density,
                                   const GapFunction& gap, std::span<const double> radii,
                                   const ConditionThresholds& thresholds,
                                   std::string gap_description) {
  require_meaning(density, RadialDensity::Meaning::abs_field, "check_mass_average");
  require_radii(radii);
  return run_ladder(ConditionKind::mass_average, radii, thresholds, std::move(gap_description),
                    [&](double r) {
                      const double b = r + checked_gap(gap, r);
                      return density_mass(g, density.profile, r, b) / r;
                    });
}

}  // namespace warpcap
