#include "warpcap/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "warpcap/errors.hpp"

namespace warpcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_params(const SobolevParams& p) {
  if (p.m < 2) throw DomainError("sobolev: dimension must be at least 2");
  if (!(p.q > 1.0 && p.q < p.m)) throw DomainError("sobolev: need 1 < q < m");
  if (!(p.S_M > 0.0)) throw DomainError("sobolev: S_M must be positive");
  if (!(p.gamma > 0.0)) throw DomainError("sobolev: gamma must be positive");
  const double expect = p.m * p.q / (p.m - p.q);
  if (!(std::abs(p.p_sob - expect) <= 1e-9 * expect))
    throw DomainError("sobolev: p_sob must equal m q / (m - q)");
}

// int_{r}^{inf} a_q, certified: convergence verdict from the (possibly
// declared, conservative) tail, remainder model from the concrete last
// segment.  Returns +inf on a divergent tail, throws on an undetermined one.
double kernel_tail_integral(const ModelGeometry& g, const Exponent& eq, double r,
                            const char* who) {
  const auto tail = g.a_p_tail(eq);
  if (!tail)
    throw DomainError(std::string(who) + ": kernel tail undetermined; result is inconclusive");
  switch (classify_tail_integral(*tail)) {
    case TailVerdict::diverges:
      return kInf;
    case TailVerdict::undetermined:
      throw DomainError(std::string(who) + ": kernel tail undetermined; result is inconclusive");
    case TailVerdict::converges:
      break;
  }
  const auto value_tail = g.a_p_value_tail(eq);
  const auto res = integrate_improper([&](double t) { return g.a_p(eq, t); }, r,
                                      value_tail ? *value_tail : *tail, g.quad_config(),
                                      g.hints_in(r, kInf));
  if (!res.converges() || !res.value)
    throw DomainError(std::string(who) + ": kernel tail classification inconsistent");
  if (!res.quadrature_ok)
    throw QuadratureError(std::string(who) + ": kernel tail integral not certified", *res.value,
                          res.err_estimate);
  return *res.value;
}

void validate_counterexample_spec(const CounterexampleSpec& spec) {
  if (spec.m < 2) throw DomainError("build_counterexample: dimension must be at least 2");
  if (!(spec.gamma > 0.0)) throw DomainError("build_counterexample: gamma must be positive");
  const double lo = (spec.q - 1.0) / (spec.m - 1.0);
  const double hi = (spec.m - spec.q) / (spec.m - 1.0);
  if (!(spec.q > 1.0) || !(lo < hi))
    throw DomainError(
        "build_counterexample: beta interval ((q-1)/(m-1), (m-q)/(m-1)) is empty; "
        "need 1 < q < (m+1)/2");
  if (!(lo < spec.beta && spec.beta < hi)) {
    std::ostringstream msg;
    msg << "build_counterexample: beta must lie in (" << lo << ", " << hi << "), got "
        << spec.beta;
    throw DomainError(msg.str());
  }
  const double h_min = counterexample_h_threshold(spec.m, spec.gamma);
  if (!(spec.H > h_min)) {
    std::ostringstream msg;
    msg << "build_counterexample: H must exceed (1/4)(m 10^m gamma / omega_{m-1})^{1/(m-1)} = "
        << h_min << ", got " << spec.H;
    throw DomainError(msg.str());
  }
  if (!(spec.H >= 1.0))
    throw DomainError(
        "build_counterexample: H must be at least 1 so the fast branch stays above t^beta "
        "from t = 1 on");
  if (!(spec.smoothing_width > 0.0 && spec.smoothing_width <= 0.8))
    throw DomainError("build_counterexample: smoothing width must lie in (0, 0.8]");
  if (!(spec.extent >= 12.0) || !std::isfinite(spec.extent))
    throw DomainError("build_counterexample: extent must be finite and at least 12");
}

int realized_periods(const CounterexampleSpec& spec) {
  return std::max(2, static_cast<int>(std::ceil((spec.extent - 4.0) / 4.0)));
}

}  // namespace

SobolevParams sobolev_params(int m, double q, double S_M, double gamma) {
  SobolevParams p{m, q, 1.0, S_M, gamma};
  if (m < 2) throw DomainError("sobolev: dimension must be at least 2");
  if (!(q > 1.0 && q < m)) throw DomainError("sobolev: need 1 < q < m");
  p.p_sob = m * q / (m - q);
  validate_params(p);
  return p;
}

double sobolev_area_constant(const SobolevParams& params) {
  validate_params(params);
  const double vol_exp = -(params.m - params.q) / (params.m * (params.q - 1.0));
  return std::pow(params.gamma, vol_exp) * std::pow(params.S_M, params.q / (params.q - 1.0));
}

CapacityRelation sobolev_capacity_relation(const SobolevParams& params, const ModelGeometry& g,
                                           double r1, double r2, double tol) {
  validate_params(params);
  if (g.dim() != params.m)
    throw DomainError("sobolev_capacity_relation: params dimension differs from the manifold's");
  if (!(r1 > 0.0) || !std::isfinite(r1) || !(r2 > r1))
    throw DomainError("sobolev_capacity_relation: need 0 < r1 < r2");
  if (!(tol >= 0.0)) throw DomainError("sobolev_capacity_relation: tolerance must be nonnegative");

  const Exponent eq(params.q);
  const double kernel = std::isinf(r2)
                            ? kernel_tail_integral(g, eq, r1, "sobolev_capacity_relation")
                            : ap_integral(g, eq, r1, r2);

  CapacityRelation out;
  out.lhs = std::pow(g.volume(r1), params.q / params.p_sob);
  out.rhs = std::isinf(kernel)
                ? 0.0
                : std::pow(params.S_M, params.q) / std::pow(kernel, params.q - 1.0);
  out.holds = out.lhs <= out.rhs * (1.0 + tol);
  return out;
}

std::vector<double> lower_area_products(const ModelGeometry& g, double q,
                                        std::span<const double> radii) {
  if (!(q > 1.0 && q < g.dim())) throw DomainError("lower_area_products: need 1 < q < m");
  if (radii.empty()) throw DomainError("lower_area_products: need at least one radius");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
      throw DomainError("lower_area_products: radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw DomainError("lower_area_products: radii must be strictly increasing");
  }

  const Exponent eq(q);
  const double power = (g.dim() - q) / (q - 1.0);
  const double total = kernel_tail_integral(g, eq, radii.front(), "lower_area_products");
  if (std::isinf(total)) return std::vector<double>(radii.size(), kInf);

  auto ap_fn = [&](double t) { return g.a_p(eq, t); };
  const std::vector<double> cum =
      radii.size() > 1
          ? integrate_cumulative(ap_fn, radii, g.quad_config(),
                                 g.hints_in(radii.front(), radii.back()))
          : std::vector<double>{0.0};

  std::vector<double> out(radii.size());
  for (size_t i = 0; i < radii.size(); ++i)
    out[i] = std::pow(radii[i], power) * std::max(0.0, total - cum[i]);
  return out;
}

LowerAreaCheck lower_area_check(const SobolevParams& params, const ModelGeometry& g,
                                std::span<const double> radii, double tol) {
  validate_params(params);
  if (g.dim() != params.m)
    throw DomainError("lower_area_check: params dimension differs from the manifold's");
  if (!(tol >= 0.0)) throw DomainError("lower_area_check: tolerance must be nonnegative");

  LowerAreaCheck out;
  out.c_s = sobolev_area_constant(params);
  out.radii.assign(radii.begin(), radii.end());
  out.products = lower_area_products(g, params.q, radii);
  out.max_product = *std::max_element(out.products.begin(), out.products.end());
  out.holds = out.max_product <= out.c_s * (1.0 + tol);
  return out;
}

double counterexample_h_threshold(int m, double gamma) {
  if (m < 2) throw DomainError("counterexample_h_threshold: dimension must be at least 2");
  if (!(gamma > 0.0)) throw DomainError("counterexample_h_threshold: gamma must be positive");
  return 0.25 * std::pow(m * std::pow(10.0, m) * gamma / unit_sphere_area(m),
                         1.0 / (m - 1.0));
}

ModelManifold build_counterexample(const CounterexampleSpec& spec) {
  validate_counterexample_spec(spec);

  const double beta = spec.beta, H = spec.H;
  const double w2 = 0.5 * spec.smoothing_width;
  const int K = realized_periods(spec);

  auto slow = [beta](double t) { return std::pow(t, beta); };
  auto slow_d = [beta](double t) { return beta * std::pow(t, beta - 1.0); };
  auto fast = [H](double t) { return H * t; };
  auto fast_d = [H](double) { return H; };
  auto ident = [](double t) { return t; };
  auto ident_d = [](double) { return 1.0; };

  // C^1 blend between two branches inside [wl, wr]: cubic smoothstep weight,
  // tabulated with the blend's exact values and slopes, so each window joins
  // its neighbours with matching value and derivative.
  constexpr int kWindowNodes = 17;
  auto blend_window = [&](double wl, double wr, auto&& L, auto&& Ld, auto&& R, auto&& Rd) {
    const double w = wr - wl;
    std::vector<double> ts(kWindowNodes), vs(kWindowNodes), ms(kWindowNodes);
    for (int i = 0; i < kWindowNodes; ++i) {
      const double u = static_cast<double>(i) / (kWindowNodes - 1);
      const double t = i + 1 == kWindowNodes ? wr : wl + u * w;
      const double s = u * u * (3.0 - 2.0 * u);
      const double sd = 6.0 * u * (1.0 - u) / w;
      ts[i] = t;
      vs[i] = L(t) + s * (R(t) - L(t));
      ms[i] = Ld(t) + sd * (R(t) - L(t)) + s * (Rd(t) - Ld(t));
    }
    return Segment::tabulated(std::move(ts), std::move(vs), std::move(ms));
  };

  std::vector<Segment> segs;
  segs.push_back(Segment::linear(1.0, 0.0, 0.5 - w2));
  segs.push_back(blend_window(0.5 - w2, 0.5 + w2, ident, ident_d, fast, fast_d));
  for (int k = 0; k < K; ++k) {
    const double c_down = 4.0 * k + 2.5;
    segs.push_back(Segment::linear(H, 4.0 * k + 0.5 + w2, c_down - w2));
    segs.push_back(blend_window(c_down - w2, c_down + w2, fast, fast_d, slow, slow_d));
    const bool last = k + 1 == K;
    segs.push_back(Segment::power(1.0, beta, c_down + w2, last ? kInf : 4.0 * k + 4.5 - w2));
    if (!last) {
      const double c_up = 4.0 * k + 4.5;
      segs.push_back(blend_window(c_up - w2, c_up + w2, slow, slow_d, fast, fast_d));
    }
  }

  WarpingProfile h(std::move(segs),
                   TailModel::oscillating({1.0, beta}, {H, 1.0}, 1.0));

  // sampled floor check: the blend windows sit between the two branches, so
  // h >= t^beta must hold from t = 1 up to the end of the alternation
  const double end = 4.0 * K;
  for (const Segment& s : h.piecewise().segments()) {
    const double a = std::max(s.t_lo(), 1.0);
    const double b = std::min(s.t_hi(), end);
    if (!(a < b)) continue;
    for (int i = 0; i <= 8; ++i) {
      const double t = a + (b - a) * i / 8.0;
      const double floor = std::pow(t, beta);
      if (!(h(t) >= floor * (1.0 - 1e-9))) {
        std::ostringstream msg;
        msg << "build_counterexample: profile dropped below t^beta at t = " << t;
        throw DomainError(msg.str());
      }
    }
  }

  return ModelManifold{spec.m, std::move(h), 1.0};
}

CounterexampleReport verify_counterexample(const ModelGeometry& g, const CounterexampleSpec& spec,
                                           double r_max) {
  validate_counterexample_spec(spec);
  if (g.dim() != spec.m)
    throw DomainError("verify_counterexample: geometry dimension differs from the spec");
  const int K = realized_periods(spec);
  const double realized = 4.0 * K;
  if (!(r_max > 8.0))
    throw DomainError("verify_counterexample: r_max must exceed the first full period (8)");
  if (r_max > realized) {
    std::ostringstream msg;
    msg << "verify_counterexample: r_max = " << r_max << " exceeds the realized alternation ("
        << realized << "); enlarge extent";
    throw DomainError(msg.str());
  }

  CounterexampleReport rep;
  std::ostringstream note;

  constexpr int kVolumeSamples = 200;
  rep.min_volume_ratio = kInf;
  for (int i = 1; i <= kVolumeSamples; ++i) {
    const double r = r_max * i / kVolumeSamples;
    const double ratio = g.volume(r) / (spec.gamma * std::pow(r, spec.m));
    rep.radii.push_back(r);
    rep.volume_ratios.push_back(ratio);
    rep.min_volume_ratio = std::min(rep.min_volume_ratio, ratio);
  }
  rep.volume_ok = rep.min_volume_ratio >= 1.0 - 1e-9;
  if (rep.volume_ok) {
    note << "volume bound holds on " << kVolumeSamples
         << " radii (min V(r)/(gamma r^m) = " << rep.min_volume_ratio << ")";
  } else {
    note << "volume bound FAILS (min V(r)/(gamma r^m) = " << rep.min_volume_ratio << ")";
  }

  const Exponent eq(spec.q);
  try {
    const double total = kernel_tail_integral(g, eq, g.base_radius(), "verify_counterexample");
    if (std::isinf(total)) {
      note << "; kernel integral diverges";
    } else {
      rep.tail_convergent = true;
      rep.aq_integral = total;
      note << "; kernel integrable (int a_q = " << total << ")";
    }
  } catch (const DomainError&) {
    note << "; kernel tail undetermined -- check (ii) inconclusive";
  } catch (const QuadratureError&) {
    note << "; kernel tail integral not certified -- check (ii) inconclusive";
  }

  for (int k = 0; 4.0 * k + 3.0 <= r_max && k < K; ++k)
    rep.product_radii.push_back(4.0 * k + 3.0);
  if (rep.tail_convergent && rep.product_radii.size() >= 2) {
    rep.products = lower_area_products(g, spec.q, rep.product_radii);
    rep.products_increasing = true;
    for (size_t i = 1; i < rep.products.size(); ++i)
      rep.products_increasing = rep.products_increasing && rep.products[i] > rep.products[i - 1];
    rep.product_growth = rep.products.front() > 0.0
                             ? rep.products.back() / rep.products.front()
                             : kInf;
    rep.products_tenfold = rep.product_growth >= 10.0;
    note << "; area-decay products along the slow-stretch starts "
         << (rep.products_increasing ? "strictly increase" : "do NOT strictly increase")
         << " (growth factor " << rep.product_growth << " over " << rep.products.size()
         << " radii)";
  } else {
    note << "; area-decay products not evaluated -- check (iii) inconclusive";
  }

  rep.counterexample_confirmed = rep.volume_ok && rep.tail_convergent &&
                                 rep.products_increasing && rep.products_tenfold;
  rep.note = note.str();
  return rep;
}

}  // namespace warpcap
