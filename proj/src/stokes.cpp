#include "warpcap/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "warpcap/errors.hpp"
#include "warpcap/random.hpp"

namespace warpcap {

namespace {

// Eventual behaviour of a profile as C t^a e^{l t}, exact beyond `from`:
// every analytic segment kind is such a form, and a tabulated final segment
// extends flat (a = l = 0) past its last node.  `vanishes` flags a profile
// that is identically zero beyond `from`.
struct EventualForm {
  double a = 0.0;
  double l = 0.0;
  double from = 1.0;
  bool vanishes = false;
};

std::optional<EventualForm> eventual_form(const RadialProfile& profile) {
  if (profile.declared_tail()) {
    const TailModel& tail = *profile.declared_tail();
    switch (tail.kind) {
      case TailModel::Kind::power:
        return EventualForm{tail.exponent, 0.0, tail.valid_from, false};
      case TailModel::Kind::exponential:
        return EventualForm{0.0, tail.rate, tail.valid_from, false};
      case TailModel::Kind::oscillating:
        return {};  // no single form to take a limit of
    }
  }
  const Segment& s = profile.segments().back();
  switch (s.kind()) {
    case SegmentKind::power:
      return EventualForm{s.exponent(), 0.0, s.t_lo(), s.coefficient() == 0.0};
    case SegmentKind::linear:
      return EventualForm{1.0, 0.0, s.t_lo(), s.exponent() == 0.0};
    case SegmentKind::constant:
      return EventualForm{0.0, 0.0, s.t_lo(), s.coefficient() == 0.0};
    case SegmentKind::exponential:
      return EventualForm{0.0, s.exponent(), s.t_lo(), s.coefficient() == 0.0};
    case SegmentKind::tabulated:
      // flat extension past the last node
      return EventualForm{0.0, 0.0, s.nodes().back(), s.node_values().back() == 0.0};
  }
  return {};
}

// Form of the flux x(t) A(t): sum of the field form and (m-1) times the
// warping form.  nullopt when either side has no single asymptotic form.
std::optional<EventualForm> flux_form(const ModelGeometry& g, const RadialField& field) {
  auto fx = eventual_form(field.x);
  if (fx && fx->vanishes) return EventualForm{0.0, 0.0, fx->from, true};
  auto fh = eventual_form(g.warping().piecewise());
  if (!fx || !fh) return {};
  const double k = g.dim() - 1;
  return EventualForm{fx->a + k * fh->a, fx->l + k * fh->l,
                      std::max({fx->from, fh->from, 1.0}), false};
}

constexpr double kExponentTol = 1e-12;

std::vector<double> merged_hints(const ModelGeometry& g, const RadialProfile& x, double a,
                                 double b) {
  std::vector<double> hints = g.hints_in(a, b);
  std::vector<double> xh = x.hints_in(a, b);
  hints.insert(hints.end(), xh.begin(), xh.end());
  std::sort(hints.begin(), hints.end());
  hints.erase(std::unique(hints.begin(), hints.end()), hints.end());
  return hints;
}

// (x A)' = x' A + x A' as a pointwise integrand.
RealFunction flux_derivative(const ModelGeometry& g, const RadialField& field) {
  return [&g, &field](double t) {
    return field.x.derivative(t) * g.area(t) + field.x.value(t) * g.area_derivative(t);
  };
}

// Segments of scale / A(t) over [from, to), one per warping piece, built
// from the closed form of each piece.
std::vector<Segment> reciprocal_segments(const ModelGeometry& g, double from, double to,
                                         double scale) {
  if (!(from > 0.0) || !(to > from)) {
    throw DomainError("reciprocal_segments: need 0 < from < to");
  }
  const int m = g.dim();
  const double omega = g.sphere_area();
  std::vector<Segment> out;
  for (const Segment& s : g.warping().piecewise().segments()) {
    if (s.t_hi() <= from || s.t_lo() >= to) continue;
    const double lo = std::max(s.t_lo(), from);
    const double hi = std::min(s.t_hi(), to);
    switch (s.kind()) {
      case SegmentKind::power:
        out.push_back(Segment::power(scale / (omega * std::pow(s.coefficient(), m - 1)),
                                     -s.exponent() * (m - 1), lo, hi));
        break;
      case SegmentKind::linear:
        out.push_back(Segment::power(scale / (omega * std::pow(s.exponent(), m - 1)),
                                     -(m - 1.0), lo, hi));
        break;
      case SegmentKind::constant:
        out.push_back(Segment::constant(scale / (omega * std::pow(s.coefficient(), m - 1)),
                                        lo, hi));
        break;
      case SegmentKind::exponential:
        out.push_back(Segment::exponential(scale / (omega * std::pow(s.coefficient(), m - 1)),
                                           -s.exponent() * (m - 1), lo, hi));
        break;
      case SegmentKind::tabulated: {
        std::vector<double> ts{lo};
        for (double node : s.nodes()) {
          if (node > ts.back() && node < hi) ts.push_back(node);
        }
        if (std::isfinite(hi) && hi > ts.back()) ts.push_back(hi);
        std::vector<double> vs, ms;
        vs.reserve(ts.size());
        ms.reserve(ts.size());
        for (double t : ts) {
          const double area = g.area(t);
          vs.push_back(scale / area);
          ms.push_back(-scale * g.area_derivative(t) / (area * area));
        }
        out.push_back(Segment::tabulated(std::move(ts), std::move(vs), std::move(ms),
                                         std::isfinite(hi) ? std::optional<double>{}
                                                           : std::optional<double>{hi}));
        break;
      }
    }
  }
  return out;
}

}  // namespace

double div_radial(const ModelGeometry& g, const RadialField& field, double r) {
  const double area = g.area(r);
  return field.x.derivative(r) + field.x.value(r) * g.area_derivative(r) / area;
}

std::pair<double, double> div_radial_one_sided(const ModelGeometry& g, const RadialField& field,
                                               double r) {
  const double area = g.area(r);
  const auto [xl, xr] = field.x.one_sided_derivative(r);
  const auto [hl, hr] = g.warping().one_sided_derivative(r);
  const double h = g.warping()(r);
  const double da_l = g.sphere_area() * (g.dim() - 1) * std::pow(h, g.dim() - 2) * hl;
  const double da_r = g.sphere_area() * (g.dim() - 1) * std::pow(h, g.dim() - 2) * hr;
  const double xv = field.x.value(r);
  return {xl + xv * da_l / area, xr + xv * da_r / area};
}

double flux(const ModelGeometry& g, const RadialField& field, double R) {
  return field.x.value(R) * g.area(R);
}

double ball_divergence_integral(const ModelGeometry& g, const RadialField& field, double R) {
  return flux(g, field, R) - field.pole_flux;
}

double ball_divergence_integral_quadrature(const ModelGeometry& g, const RadialField& field,
                                           double R, const QuadratureConfig& cfg) {
  const double lo = std::max(field.x.domain_lo(), 0.0);
  if (!(R > lo)) throw DomainError("ball_divergence_integral_quadrature: R inside field domain");
  const std::vector<double> hints = merged_hints(g, field.x, lo, R);
  return integrate(flux_derivative(g, field), lo, R, cfg, hints).value;
}

std::optional<FluxLimit> flux_limit(const ModelGeometry& g, const RadialField& field) {
  auto form = flux_form(g, field);
  if (!form) return {};
  if (form->vanishes) return FluxLimit{0.0, false, 0};
  const double T = 2.0 * std::max(form->from, 1.0);
  const double sample = flux(g, field, T);
  const int sign = sample > 0.0 ? 1 : (sample < 0.0 ? -1 : 0);
  if (form->l < -kExponentTol) return FluxLimit{0.0, false, 0};
  if (form->l > kExponentTol) return FluxLimit{0.0, true, sign};
  if (form->a < -kExponentTol) return FluxLimit{0.0, false, 0};
  if (form->a > kExponentTol) return FluxLimit{0.0, true, sign};
  // exactly constant flux beyond the last breakpoint
  return FluxLimit{sample, false, sign};
}

std::optional<NegativePart> negative_divergence_part(const ModelGeometry& g,
                                                     const RadialField& field) {
  auto form = flux_form(g, field);
  if (!form) return {};
  const double lo = std::max(field.x.domain_lo(), 0.0);
  // Beyond form->from the flux is exactly C t^a e^{l t}.  Its derivative is
  // C e^{l t} t^{a-1} (l t + a); with l != 0 the sign settles only past the
  // critical point t = -a/l, so push the numeric window beyond it.
  double T = std::max(form->from, lo + 1.0);
  if (!form->vanishes && std::abs(form->l) > kExponentTol) {
    const double crit = -form->a / form->l;
    if (crit > T) T = crit;
  }
  const RealFunction deriv = flux_derivative(g, field);
  const RealFunction neg = [&deriv](double t) { return std::max(-deriv(t), 0.0); };
  const std::vector<double> hints = merged_hints(g, field.x, lo, T);
  const QuadratureConfig cfg{.abs_tol = 1e-9, .rel_tol = 1e-9, .max_subdivisions = 4000};
  const double head = integrate(neg, lo, T, cfg, hints).value;

  if (form->vanishes) return NegativePart{true, head};

  const double C = flux(g, field, 2.0 * T);
  double drive = form->l;
  if (std::abs(drive) <= kExponentTol) drive = std::abs(form->a) <= kExponentTol ? 0.0 : form->a;
  const double eventual_sign = C * drive;

  if (eventual_sign >= 0.0) {
    // non-decreasing (or exactly constant) flux tail: no negative mass there,
    // but a divergence-growing flux still needs no negative part at all
    return NegativePart{true, head};
  }
  // strictly decreasing flux tail: integrable negative part iff the flux has
  // a finite limit, and then the tail mass telescopes to flux(T) - limit
  const bool limit_finite = form->l < -kExponentTol ||
                            (std::abs(form->l) <= kExponentTol && form->a < -kExponentTol);
  if (!limit_finite) return NegativePart{false, 0.0};
  return NegativePart{true, head + flux(g, field, T)};
}

RadialProfile smooth_bump(double lo, double hi, int nodes_per_piece) {
  if (!(0.0 < lo && lo < hi) || !std::isfinite(hi)) {
    throw DomainError("smooth_bump: need 0 < lo < hi < inf");
  }
  if (nodes_per_piece < 5) throw DomainError("smooth_bump: need at least 5 nodes");
  const int n = nodes_per_piece;
  const double width = hi - lo;
  std::vector<double> ts(n), vs(n), ms(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    ts[i] = lo + s * width;
    vs[i] = 16.0 * s * s * (1.0 - s) * (1.0 - s);
    ms[i] = 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / width;
  }
  ts.front() = lo;
  ts.back() = hi;
  std::vector<Segment> segs;
  segs.push_back(Segment::constant(0.0, 0.0, lo));
  segs.push_back(Segment::tabulated(std::move(ts), std::move(vs), std::move(ms)));
  segs.push_back(Segment::constant(0.0, hi, std::numeric_limits<double>::infinity()));
  return RadialProfile(std::move(segs));
}

RadialProfile reciprocal_area_profile(const ModelGeometry& g, double from, double scale) {
  return RadialProfile(
      reciprocal_segments(g, from, std::numeric_limits<double>::infinity(), scale));
}

RadialField unit_flux_field(const ModelGeometry& g) {
  return RadialField{reciprocal_area_profile(g, g.base_radius(), 1.0), 1.0};
}

RadialField field_from_divergence(const ModelGeometry& g, const RadialProfile& density,
                                  std::optional<double> normalize_to) {
  const auto& dsegs = density.segments();
  if (density.domain_lo() != 0.0 || std::isfinite(density.domain_hi())) {
    throw DomainError("field_from_divergence: density domain must be [0, inf)");
  }
  auto is_zero_const = [](const Segment& s) {
    return s.kind() == SegmentKind::constant && s.coefficient() == 0.0;
  };
  if (!is_zero_const(dsegs.back())) {
    throw DomainError(
        "field_from_divergence: density must end with a zero constant segment "
        "(vanish identically beyond a finite radius)");
  }
  if (!is_zero_const(dsegs.front())) {
    throw DomainError(
        "field_from_divergence: density must vanish on an initial interval around the pole");
  }

  // total mass and the normalization factor
  const RealFunction dA = [&g, &density](double t) { return density.value(t) * g.area(t); };
  double total = 0.0;
  for (const Segment& s : dsegs) {
    if (is_zero_const(s)) continue;
    const std::vector<double> hints = merged_hints(g, density, s.t_lo(), s.t_hi());
    total += integrate(dA, s.t_lo(), s.t_hi(), g.quad_config(), hints).value;
  }
  double scale = 1.0;
  if (normalize_to) {
    if (std::abs(total) < 1e-13) {
      throw DomainError("field_from_divergence: cannot normalize a balanced density");
    }
    scale = *normalize_to / total;
  }

  std::vector<Segment> xsegs;
  double mass = 0.0;        // scaled running mass at the current position
  double mass_scale = 0.0;  // total absolute mass moved so far
  for (const Segment& s : dsegs) {
    const double u = s.t_lo(), v = s.t_hi();
    if (is_zero_const(s)) {
      // a running mass below quadrature resolution is indistinguishable from
      // zero; snap it so balanced densities give exactly compactly supported
      // fields instead of a spurious residual tail
      if (std::abs(mass) <= 1e-11 * mass_scale) {
        mass = 0.0;
        xsegs.push_back(Segment::constant(0.0, u, v));
      } else {
        auto tail = reciprocal_segments(g, u, v, mass);
        xsegs.insert(xsegs.end(), tail.begin(), tail.end());
      }
      continue;
    }
    // active density piece: tabulate x = mass / A on a grid refined to the
    // merged quadrature hints, with exact slopes x' = d - x A'/A
    std::vector<double> cuts = merged_hints(g, density, u, v);
    std::vector<double> grid{u};
    const double spacing = (v - u) / 64.0;
    auto fill_to = [&grid, spacing](double target) {
      if (target <= grid.back()) return;
      const double gap = target - grid.back();
      const int pieces = std::max(1, static_cast<int>(std::ceil(gap / spacing)));
      const double start = grid.back();
      for (int i = 1; i <= pieces; ++i) grid.push_back(start + gap * i / pieces);
      grid.back() = target;
    };
    for (double c : cuts) fill_to(c);
    fill_to(v);
    const std::vector<double> cum = integrate_cumulative(dA, grid, g.quad_config(), cuts);

    // one tabulated segment per inter-cut piece, one-sided slopes at the cuts
    size_t start = 0;
    auto is_cut = [&](size_t idx) {
      return idx == grid.size() - 1 ||
             std::binary_search(cuts.begin(), cuts.end(), grid[idx]);
    };
    const double mass_in = mass;
    for (size_t i = 1; i < grid.size(); ++i) {
      if (!is_cut(i)) continue;
      std::vector<double> ts(grid.begin() + start, grid.begin() + i + 1);
      std::vector<double> vs, ms;
      vs.reserve(ts.size());
      ms.reserve(ts.size());
      for (size_t j = start; j <= i; ++j) {
        const double t = grid[j];
        const double area = g.area(t);
        const double x = (mass_in + scale * cum[j]) / area;
        vs.push_back(x);
        // right-sided slope by default; the last node of a piece takes the
        // left-sided area derivative so the Hermite data matches this side
        double da = g.area_derivative(t);
        if (j == i) {
          const double hl = g.warping().one_sided_derivative(t).first;
          da = g.sphere_area() * (g.dim() - 1) * std::pow(g.warping()(t), g.dim() - 2) * hl;
        }
        ms.push_back(scale * density.value(t) - x * da / area);
      }
      xsegs.push_back(Segment::tabulated(std::move(ts), std::move(vs), std::move(ms)));
      start = i;
    }
    mass = mass_in + scale * cum.back();
    mass_scale += std::abs(scale * cum.back());
  }
  return RadialField{RadialProfile(std::move(xsegs)), 0.0};
}

RadialDensity field_density(const RadialField& field, RadialDensity::Meaning meaning,
                            std::optional<Exponent> e) {
  double s = 1.0;
  if (meaning == RadialDensity::Meaning::q_power) {
    if (!e) throw DomainError("field_density: q_power meaning needs an exponent pair");
    s = e->q;
  }
  RadialProfile mag = field.x.abs_power(s);
  if (mag.domain_lo() > 0.0) {
    // exterior fields extend by zero inside their inner boundary
    std::vector<Segment> segs;
    segs.push_back(Segment::constant(0.0, 0.0, mag.domain_lo()));
    for (const Segment& seg : mag.segments()) segs.push_back(seg);
    mag = RadialProfile(std::move(segs), mag.declared_tail());
  }
  return RadialDensity{std::move(mag), meaning};
}

std::vector<RadialField> random_bump_fields(const ModelGeometry& g, int count, uint64_t seed) {
  if (count <= 0) throw DomainError("random_bump_fields: count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<RadialField> fields;
  fields.reserve(count);
  const double inf = std::numeric_limits<double>::infinity();

  for (int idx = 0; idx < count; ++idx) {
    const bool balanced = idx % 2 == 0;
    const int k = balanced ? 2 + static_cast<int>(rng() % 2) : 1 + static_cast<int>(rng() % 3);

    // disjoint supports inside [0.3, 6] with a minimum spacing
    std::vector<double> cuts(2 * k);
    for (int attempt = 0;; ++attempt) {
      for (double& c : cuts) c = uniform(rng, 0.3, 6.0);
      std::sort(cuts.begin(), cuts.end());
      bool ok = true;
      for (size_t i = 1; i < cuts.size(); ++i) ok = ok && cuts[i] - cuts[i - 1] >= 0.12;
      if (ok) break;
      if (attempt > 2000) throw DomainError("random_bump_fields: could not place supports");
    }

    // unit bumps, their masses, and the signed weights
    std::vector<Segment> unit_tabs;
    std::vector<double> masses(k);
    for (int j = 0; j < k; ++j) {
      RadialProfile bump = smooth_bump(cuts[2 * j], cuts[2 * j + 1]);
      const Segment* tab = nullptr;
      for (const Segment& s : bump.segments()) {
        if (s.kind() == SegmentKind::tabulated) tab = &s;
      }
      const RealFunction f = [&](double t) { return bump.value(t) * g.area(t); };
      const std::vector<double> hints = merged_hints(g, bump, tab->t_lo(), tab->t_hi());
      masses[j] = integrate(f, tab->t_lo(), tab->t_hi(), g.quad_config(), hints).value;
      unit_tabs.push_back(*tab);
    }
    std::vector<double> w(k);
    for (int j = 0; j < k; ++j) {
      w[j] = uniform(rng, 0.4, 2.0) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
    }
    if (balanced) {
      double partial = 0.0;
      for (int j = 0; j + 1 < k; ++j) partial += w[j] * masses[j];
      w[k - 1] = -partial / masses[k - 1];
    } else {
      double tot = 0.0;
      for (int j = 0; j < k; ++j) tot += w[j] * masses[j];
      if (std::abs(tot) < 0.05) w[0] += 0.6 / masses[0];
    }

    // assemble the signed density and integrate it into a field
    std::vector<Segment> dsegs;
    double pos = 0.0;
    for (int j = 0; j < k; ++j) {
      dsegs.push_back(Segment::constant(0.0, pos, cuts[2 * j]));
      dsegs.push_back(unit_tabs[j].scaled(w[j]));
      pos = cuts[2 * j + 1];
    }
    dsegs.push_back(Segment::constant(0.0, pos, inf));
    fields.push_back(field_from_divergence(g, RadialProfile(std::move(dsegs))));
  }
  return fields;
}

StokesReport theorem_harness(const ModelGeometry& g, const Exponent& e,
                             const RadialField& field, ConditionKind condition,
                             std::span<const double> radii, const HarnessOptions& options) {
  if (radii.size() < 2) throw DomainError("theorem_harness: need at least two radii");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1])) {
      throw DomainError("theorem_harness: radii must be positive and strictly increasing");
    }
  }
  StokesReport rep;
  rep.radii.assign(radii.begin(), radii.end());

  double max_flux = 0.0;
  bool residuals_ok = true;
  for (double R : radii) {
    const double fl = flux(g, field, R);
    const double by_flux = fl - field.pole_flux;
    const double by_quad = ball_divergence_integral_quadrature(g, field, R);
    const double res = std::abs(by_quad - by_flux);
    rep.fluxes.push_back(fl);
    rep.ball_integrals.push_back(by_quad);
    rep.residuals.push_back(res);
    residuals_ok = residuals_ok && res <= options.residual_tol * (1.0 + std::abs(by_flux));
    max_flux = std::max(max_flux, std::abs(fl));
  }
  rep.residuals_ok = residuals_ok;

  const GapFunction gap = options.gap ? options.gap : doubling_gap();
  const auto meaning = condition == ConditionKind::mass_average
                           ? RadialDensity::Meaning::abs_field
                           : RadialDensity::Meaning::q_power;
  const RadialDensity density = field_density(field, meaning, e);
  switch (condition) {
    case ConditionKind::annulus_kernel:
      rep.condition = check_annulus_kernel(g, e, density, gap, radii, options.thresholds);
      break;
    case ConditionKind::volume_growth:
      rep.condition = check_volume_growth(g, e, density, gap, radii, options.thresholds);
      break;
    case ConditionKind::energy_level_set: {
      EvansPotential f(g, e);
      rep.condition = check_energy_level_set(f, density, gap, radii, options.thresholds);
      break;
    }
    case ConditionKind::mass_average:
      rep.condition = check_mass_average(g, density, gap, radii, options.thresholds);
      break;
  }

  rep.negative_part = negative_divergence_part(g, field);

  std::ostringstream note;
  note << "two ball-integral routes " << (residuals_ok ? "agree" : "DISAGREE")
       << " (max residual "
       << (rep.residuals.empty()
               ? 0.0
               : *std::max_element(rep.residuals.begin(), rep.residuals.end()))
       << "). ";
  const auto limit = flux_limit(g, field);
  if (!limit) {
    rep.conclusion = StokesReport::Conclusion::inconclusive;
    note << "Flux tail has no single analytic form; the limit of the divergence "
            "integral is uncertified and the conclusion rests on tested radii only.";
  } else if (limit->infinite) {
    rep.conclusion = StokesReport::Conclusion::nonzero;
    rep.limit_infinite = true;
    rep.limit_sign = limit->sign;
    note << "Flux diverges along the tail: the divergence integral is unbounded.";
  } else {
    const double L = limit->value - field.pole_flux;
    rep.limit_value = L;
    const double vanish_scale = 1.0 + std::max(max_flux, std::abs(limit->value));
    if (std::abs(L) <= options.vanish_tol * vanish_scale) {
      rep.conclusion = StokesReport::Conclusion::vanishes;
      note << "Certified flux limit matches the inner flux: the divergence integral "
              "vanishes.";
    } else {
      rep.conclusion = StokesReport::Conclusion::nonzero;
      note << "Certified flux limit " << limit->value << " differs from the inner flux "
           << field.pole_flux << ": the divergence integral equals " << L << ".";
    }
  }

  rep.inconsistent = rep.condition.verdict == ConditionVerdict::supported &&
                     rep.negative_part && rep.negative_part->finite &&
                     rep.conclusion == StokesReport::Conclusion::nonzero;
  if (rep.inconsistent) {
    note << " INCONSISTENT: the decay condition holds and the negative part is "
            "integrable, yet the integral does not vanish -- this contradicts the "
            "vanishing theorem and indicates a computational fault.";
  }
  rep.note = note.str();
  return rep;
}

}  // namespace warpcap
