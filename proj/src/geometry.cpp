#include "warpcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpcap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
}  // namespace

Exponent::Exponent(double p_value) : p(p_value) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("Exponent: p must be finite and > 1");
  q = p / (p - 1.0);
}

Exponent::Exponent(double p_value, double q_value) : p(p_value), q(q_value) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("Exponent: p must be finite and > 1");
  if (!(q > 1.0) || !std::isfinite(q)) throw DomainError("Exponent: q must be finite and > 1");
  if (std::fabs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
    throw DomainError("Exponent: p and q must be conjugate (1/p + 1/q = 1)");
}

double unit_sphere_area(int dim) {
  if (dim < 2) throw DomainError("unit_sphere_area: dimension must be >= 2");
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

ModelGeometry::ModelGeometry(ModelManifold model, QuadratureConfig cache_cfg)
    : model_(std::move(model)), cfg_(cache_cfg) {
  if (model_.dim < 2) throw DomainError("ModelManifold: dimension must be >= 2");
  if (!(model_.base_radius > 0.0) || !std::isfinite(model_.base_radius))
    throw DomainError("ModelManifold: base_radius must be positive and finite");
  cfg_.validate();
  omega_ = unit_sphere_area(model_.dim);

  vol_breaks_.push_back(0.0);
  for (double t : model_.h.piecewise().quadrature_hints())
    if (std::isfinite(t) && t > 0.0) vol_breaks_.push_back(t);
  auto area_fn = [this](double t) { return area(t); };
  vol_cum_ = vol_breaks_.size() > 1
                 ? integrate_cumulative(area_fn, vol_breaks_, cfg_)
                 : std::vector<double>{0.0};
}

double ModelGeometry::area(double t) const {
  return omega_ * std::pow(model_.h(t), model_.dim - 1);
}

double ModelGeometry::area_derivative(double t) const {
  // A' = omega (m-1) h^{m-2} h'
  const int m = model_.dim;
  return omega_ * (m - 1) * std::pow(model_.h(t), m - 2) * model_.h.derivative(t);
}

double ModelGeometry::partial_volume(double from, double to) const {
  if (to == from) return 0.0;
  return integrate([this](double t) { return area(t); }, from, to, cfg_).value;
}

double ModelGeometry::volume(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("volume: radius must be positive and finite");
  const size_t i =
      std::upper_bound(vol_breaks_.begin(), vol_breaks_.end(), t) - vol_breaks_.begin() - 1;
  return vol_cum_[i] + partial_volume(vol_breaks_[i], t);
}

double ModelGeometry::volume_between(double r1, double r2) const {
  if (!(0.0 <= r1 && r1 < r2) || !std::isfinite(r2))
    throw DomainError("volume_between: need 0 <= r1 < r2 < inf");
  const size_t i =
      std::upper_bound(vol_breaks_.begin(), vol_breaks_.end(), r1) - vol_breaks_.begin() - 1;
  const size_t j =
      std::upper_bound(vol_breaks_.begin(), vol_breaks_.end(), r2) - vol_breaks_.begin() - 1;
  if (i == j) return partial_volume(r1, r2);
  // positive pieces only; avoids cancellation between large cumulative values
  return partial_volume(r1, vol_breaks_[i + 1]) + (vol_cum_[j] - vol_cum_[i + 1]) +
         partial_volume(vol_breaks_[j], r2);
}

double ModelGeometry::a_p(const Exponent& e, double t) const {
  return std::pow(area(t), -1.0 / (e.p - 1.0));
}

double ModelGeometry::b_p(const Exponent& e, double r1, double t) const {
  if (!(t > r1) || !(r1 >= 0.0)) throw DomainError("b_p: need t > r1 >= 0");
  const double shell = r1 == 0.0 ? volume(t) : volume_between(r1, t);
  return std::pow((t - r1) / shell, 1.0 / (e.p - 1.0));
}

namespace {

// h-tail -> A-tail under A = omega h^{m-1}.
std::optional<TailModel> transform_area(const std::optional<TailModel>& h_tail, double omega,
                                        int m) {
  if (!h_tail) return std::nullopt;
  const double k = m - 1;
  switch (h_tail->kind) {
    case TailModel::Kind::power:
      return TailModel::power_growth(h_tail->exponent * k, h_tail->valid_from);
    case TailModel::Kind::exponential:
      return TailModel::exponential_rate(h_tail->rate * k, h_tail->valid_from);
    case TailModel::Kind::oscillating: {
      auto env = [&](const PowerEnvelope& v) {
        return PowerEnvelope{omega * std::pow(v.coefficient, k), v.exponent * k};
      };
      return TailModel::oscillating(env(h_tail->lower), env(h_tail->upper),
                                    h_tail->valid_from);
    }
  }
  return std::nullopt;
}

// A-tail -> a_p-tail under a_p = A^{-1/(p-1)}; envelopes swap sides because
// the map is decreasing.
std::optional<TailModel> transform_ap(const std::optional<TailModel>& area_tail, double p) {
  if (!area_tail) return std::nullopt;
  const double s = -1.0 / (p - 1.0);
  switch (area_tail->kind) {
    case TailModel::Kind::power:
      return TailModel::power_growth(area_tail->exponent * s, area_tail->valid_from);
    case TailModel::Kind::exponential:
      return TailModel::exponential_rate(area_tail->rate * s, area_tail->valid_from);
    case TailModel::Kind::oscillating: {
      auto env = [&](const PowerEnvelope& v) {
        return PowerEnvelope{std::pow(v.coefficient, s), v.exponent * s};
      };
      return TailModel::oscillating(env(area_tail->upper), env(area_tail->lower),
                                    area_tail->valid_from);
    }
  }
  return std::nullopt;
}

std::optional<TailModel> last_segment_tail(const PiecewiseProfile& prof) {
  if (prof.domain_hi() != kInf) return std::nullopt;
  const Segment& last = prof.segments().back();
  const double from = std::max(last.t_lo(), 1.0);
  switch (last.kind()) {
    case SegmentKind::power:
      return TailModel::power_growth(last.exponent(), from);
    case SegmentKind::linear:
      return TailModel::power_growth(1.0, from);
    case SegmentKind::constant:
      return TailModel::power_growth(0.0, from);
    case SegmentKind::exponential:
      return TailModel::exponential_rate(last.exponent(), from);
    case SegmentKind::tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<TailModel> ModelGeometry::area_tail() const {
  return transform_area(model_.h.tail_class(), omega_, model_.dim);
}

std::optional<TailModel> ModelGeometry::a_p_tail(const Exponent& e) const {
  return transform_ap(area_tail(), e.p);
}

std::optional<TailModel> ModelGeometry::a_p_value_tail(const Exponent& e) const {
  return transform_ap(transform_area(last_segment_tail(model_.h.piecewise()), omega_, model_.dim),
                      e.p);
}

std::vector<double> ModelGeometry::hints_in(double a, double b) const {
  return model_.h.piecewise().hints_in(a, b);
}

double ap_integral(const ModelGeometry& g, const Exponent& e, double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2) || !std::isfinite(r2))
    throw DomainError("ap_integral: need 0 < r1 < r2 < inf");
  return integrate_strict([&](double t) { return g.a_p(e, t); }, r1, r2, g.quad_config(),
                          g.hints_in(r1, r2));
}

EvansPotential::EvansPotential(const ModelGeometry& g, const Exponent& e) : g_(g), e_(e) {
  breaks_.push_back(g.base_radius());
  for (double t : g.hints_in(g.base_radius(), kInf)) breaks_.push_back(t);
  auto ap_fn = [this](double t) { return g_.a_p(e_, t); };
  cum_ = breaks_.size() > 1 ? integrate_cumulative(ap_fn, breaks_, g_.quad_config())
                            : std::vector<double>{0.0};

  limit_.verdict = TailVerdict::undetermined;
  if (auto tail = g_.a_p_tail(e_)) {
    limit_.verdict = classify_tail_integral(*tail);
    if (limit_.verdict == TailVerdict::converges) {
      // concrete last-segment tail for the analytic remainder
      auto value_tail = g_.a_p_value_tail(e_);
      limit_ = integrate_improper(ap_fn, g_.base_radius(),
                                  value_tail ? *value_tail : *tail, g_.quad_config(),
                                  g_.hints_in(g_.base_radius(), kInf));
    }
  }
}

double EvansPotential::partial(double from, double to) const {
  if (to == from) return 0.0;
  return integrate([this](double t) { return g_.a_p(e_, t); }, from, to, g_.quad_config()).value;
}

double EvansPotential::operator()(double r) const {
  if (!(r >= breaks_.front()) || !std::isfinite(r))
    throw DomainError("EvansPotential: radius must be >= base_radius and finite");
  const size_t i =
      std::upper_bound(breaks_.begin(), breaks_.end(), r) - breaks_.begin() - 1;
  return cum_[i] + partial(breaks_[i], r);
}

double EvansPotential::derivative(double r) const {
  if (!(r >= breaks_.front())) throw DomainError("EvansPotential: radius must be >= base_radius");
  return g_.a_p(e_, r);
}

double EvansPotential::integral_between(double r1, double r2) const {
  if (!(breaks_.front() <= r1 && r1 <= r2))
    throw DomainError("EvansPotential: need base_radius <= r1 <= r2");
  if (r1 == r2) return 0.0;
  const size_t i = std::upper_bound(breaks_.begin(), breaks_.end(), r1) - breaks_.begin() - 1;
  const size_t j = std::upper_bound(breaks_.begin(), breaks_.end(), r2) - breaks_.begin() - 1;
  if (i == j) return partial(r1, r2);
  return partial(r1, breaks_[i + 1]) + (cum_[j] - cum_[i + 1]) + partial(breaks_[j], r2);
}

std::optional<double> EvansPotential::inverse(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y))
    throw DomainError("EvansPotential::inverse: target must be nonnegative and finite");
  if (y == 0.0) return breaks_.front();
  if (limit_.converges() && limit_.value && y >= *limit_.value) return std::nullopt;

  // bracket [lo, hi] with f(lo) < y <= f(hi)
  double lo = breaks_.front(), hi;
  const size_t j = std::lower_bound(cum_.begin(), cum_.end(), y) - cum_.begin();
  if (j < cum_.size()) {
    hi = breaks_[j];
    if (j > 0) lo = breaks_[j - 1];
  } else {
    lo = breaks_.back();
    hi = std::max(2.0 * lo, lo + 1.0);
    double f_hi = (*this)(hi);
    while (f_hi < y) {
      if (hi > 1e15) return std::nullopt;
      lo = hi;
      hi *= 2.0;
      f_hi = (*this)(hi);
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double p_flux(const ModelGeometry& g, const Exponent& e, const RadialFunction& u, double r) {
  const double du = u.derivative(r);
  const double mag = std::pow(std::fabs(du), e.p - 1.0);
  return g.area(r) * (du >= 0.0 ? mag : -mag);
}

double radial_p_laplacian(const ModelGeometry& g, const Exponent& e, const RadialFunction& u,
                          double r, double step_scale) {
  if (!(r > 0.0)) throw DomainError("radial_p_laplacian: radius must be positive");
  const double h = step_scale * std::max(1.0, std::fabs(r));
  auto F = [&](double s) { return p_flux(g, e, u, s); };
  const bool left_clean = g.hints_in(r - h, r).empty() && r - h > 0.0;
  const bool right_clean = g.hints_in(r, r + h).empty();
  double dF;
  if (left_clean && right_clean) {
    dF = (F(r + h) - F(r - h)) / (2.0 * h);
  } else if (right_clean && g.hints_in(r, r + 2.0 * h).empty()) {
    dF = (-3.0 * F(r) + 4.0 * F(r + h) - F(r + 2.0 * h)) / (2.0 * h);
  } else if (left_clean && g.hints_in(r - 2.0 * h, r).empty()) {
    dF = (3.0 * F(r) - 4.0 * F(r - h) + F(r - 2.0 * h)) / (2.0 * h);
  } else {
    throw DomainError("radial_p_laplacian: stencil straddles profile joints on both sides");
  }
  return dF / g.area(r);
}

}  // namespace warpcap
