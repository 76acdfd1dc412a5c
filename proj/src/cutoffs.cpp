#include "warpcap/cutoffs.hpp"

#include <algorithm>
#include <cmath>

#include "warpcap/random.hpp"

namespace warpcap {

namespace {

void check_annulus(double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2) || !std::isfinite(r2))
    throw DomainError("cutoff: need 0 < r1 < r2 < inf");
}

}  // namespace

double phi_eval(const ModelGeometry& g, const Exponent& e, double r1, double r2, double r) {
  check_annulus(r1, r2);
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  return ap_integral(g, e, r, r2) / ap_integral(g, e, r1, r2);
}

double phi_energy(const ModelGeometry& g, const Exponent& e, double r1, double r2) {
  check_annulus(r1, r2);
  return std::pow(ap_integral(g, e, r1, r2), 1.0 - e.p);
}

double phi_energy_quadrature(const ModelGeometry& g, const Exponent& e, double r1, double r2) {
  check_annulus(r1, r2);
  const double denom = ap_integral(g, e, r1, r2);
  // |phi'| = a_p / denom pointwise
  return integrate_strict(
      [&](double t) {
        return std::pow(g.a_p(e, t) / denom, e.p) * g.area(t);
      },
      r1, r2, g.quad_config(), g.hints_in(r1, r2));
}

double xi_energy_bound(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                       double epsilon) {
  check_annulus(r1, r2);
  if (!(epsilon > 0.0)) throw DomainError("xi_energy_bound: epsilon must be positive");
  const double slope = (1.0 + epsilon) / (r2 - r1);
  const double shell =
      integrate_strict([&](double t) { return g.area(t); }, r1, r2, g.quad_config(),
                       g.hints_in(r1, r2));
  return std::pow(slope, e.p) * shell;
}

RadialProfile mollified_xi(double r1, double r2, double epsilon) {
  check_annulus(r1, r2);
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("mollified_xi: epsilon must lie in (0, 1)");
  const double width = r2 - r1;
  const double s = (1.0 + epsilon) / width;          // max slope magnitude
  const double delta = width * epsilon / (1.0 + epsilon);  // corner width

  // uniform slope budget: parabolic ease-in, straight middle, ease-out;
  // cubic Hermite reproduces the parabolic corners exactly
  const std::vector<double> ts{r1, r1 + delta, r2 - delta, r2};
  const double corner_drop = 0.5 * s * delta;
  const std::vector<double> vs{1.0, 1.0 - corner_drop, corner_drop, 0.0};
  const std::vector<double> ms{0.0, -s, -s, 0.0};

  std::vector<Segment> segs;
  if (r1 > 0.0) segs.push_back(Segment::constant(1.0, 0.0, r1));
  segs.push_back(Segment::tabulated(ts, vs, ms));
  segs.push_back(Segment::constant(0.0, r2, INFINITY));
  return RadialProfile(std::move(segs));
}

double custom_energy(const ModelGeometry& g, const Exponent& e, const RadialProfile& psi,
                     double r1, double r2) {
  check_annulus(r1, r2);
  if (psi.domain_lo() > r1 || psi.domain_hi() < r2)
    throw DomainError("custom_energy: cutoff profile does not cover the annulus");
  if (std::fabs(psi(r1) - 1.0) > 1e-9)
    throw DomainError("custom_energy: cutoff must equal 1 at the inner radius");
  if (std::fabs(psi(r2)) > 1e-9)
    throw DomainError("custom_energy: cutoff must vanish at the outer radius");
  for (int k = 0; k <= 64; ++k) {
    const double t = r1 + (r2 - r1) * k / 64.0;
    const double v = psi(t);
    if (v < -1e-9 || v > 1.0 + 1e-9)
      throw DomainError("custom_energy: cutoff values must stay within [0, 1]");
  }
  std::vector<double> hints = psi.hints_in(r1, r2);
  {
    auto gh = g.hints_in(r1, r2);
    hints.insert(hints.end(), gh.begin(), gh.end());
    std::sort(hints.begin(), hints.end());
    hints.erase(std::unique(hints.begin(), hints.end()), hints.end());
  }
  const double variation = integrate_strict(
      [&](double t) { return std::fabs(psi.derivative(t)); }, r1, r2, g.quad_config(), hints);
  if (variation < 1.0 - 1e-9)
    throw DomainError("custom_energy: cutoff total variation must be at least 1");
  return integrate_strict(
      [&](double t) {
        return std::pow(std::fabs(psi.derivative(t)), e.p) * g.area(t);
      },
      r1, r2, g.quad_config(), hints);
}

double plateau_value(double f_at_point, double r) {
  if (!(r > 0.0)) throw DomainError("plateau_value: level must be positive");
  return std::max(std::min(2.0 * r - f_at_point, r), 0.0);
}

RadialProfile plateau_profile(const EvansPotential& f, double r, int nodes) {
  if (!(r > 0.0)) throw DomainError("plateau_profile: level must be positive");
  if (nodes < 2) throw DomainError("plateau_profile: need at least two nodes");
  const auto s1 = f.inverse(r);
  const auto s2 = f.inverse(2.0 * r);
  if (!s1 || !s2)
    throw DomainError("plateau_profile: potential does not exhaust the level 2r");

  // nodes uniform in the potential value (the descent is linear in f), with
  // exact slopes -a_p at each node
  std::vector<double> ts(nodes), vs(nodes), ms(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double level = r + r * i / (nodes - 1.0);
    const double t = i == 0 ? *s1 : i == nodes - 1 ? *s2 : *f.inverse(level);
    ts[i] = t;
    vs[i] = 2.0 * r - level;
    ms[i] = -f.derivative(t);
  }
  vs.front() = r;
  vs.back() = 0.0;
  ms.front() = -f.derivative(*s1);
  ms.back() = -f.derivative(*s2);

  std::vector<Segment> segs;
  if (*s1 > 0.0) segs.push_back(Segment::constant(r, 0.0, *s1));
  segs.push_back(Segment::tabulated(ts, vs, ms));
  segs.push_back(Segment::constant(0.0, *s2, INFINITY));
  return RadialProfile(std::move(segs));
}

RadialProfile random_admissible_cutoff(double r1, double r2, int knots, std::mt19937_64& rng) {
  check_annulus(r1, r2);
  if (knots < 0) throw DomainError("random_admissible_cutoff: knots must be nonnegative");

  std::vector<double> ts;
  ts.push_back(r1);
  for (int i = 0; i < knots; ++i) ts.push_back(uniform(rng, r1, r2));
  ts.push_back(r2);
  std::sort(ts.begin(), ts.end());
  // drop near-coincident knots to keep segments well formed
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [&](double a, double b) { return b - a < 1e-6 * (r2 - r1); }),
           ts.end());
  if (ts.back() != r2) ts.back() = r2;

  // random positive drops, normalized to a total descent of exactly 1
  const size_t n = ts.size();
  std::vector<double> drops(n - 1);
  double total = 0.0;
  for (double& d : drops) {
    d = uniform(rng, 0.05, 1.0);
    total += d;
  }
  std::vector<double> vs(n);
  vs[0] = 1.0;
  for (size_t i = 0; i + 1 < n; ++i) vs[i + 1] = vs[i] - drops[i] / total;
  vs.back() = 0.0;

  // one two-node segment per straight piece: matching endpoint slopes make
  // the cubic interpolant exactly linear, and kinks land on segment joints
  std::vector<Segment> segs;
  if (r1 > 0.0) segs.push_back(Segment::constant(1.0, 0.0, r1));
  for (size_t i = 0; i + 1 < n; ++i) {
    const double secant = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]);
    segs.push_back(Segment::tabulated({ts[i], ts[i + 1]}, {vs[i], vs[i + 1]},
                                      std::vector<double>{secant, secant}));
  }
  segs.push_back(Segment::constant(0.0, r2, INFINITY));
  return RadialProfile(std::move(segs));
}

std::vector<EnergySweepRow> energy_sweep(const ModelGeometry& g, const Exponent& e,
                                         std::span<const double> radii, double epsilon,
                                         double factor) {
  if (!(factor > 1.0)) throw DomainError("energy_sweep: factor must exceed 1");
  std::vector<EnergySweepRow> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    EnergySweepRow row;
    row.r = r;
    row.phi_energy = phi_energy(g, e, r, factor * r);
    row.xi_bound = xi_energy_bound(g, e, r, factor * r, epsilon);
    row.ratio = row.phi_energy / row.xi_bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace warpcap
