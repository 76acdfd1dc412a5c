#include "warpcap/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(double lo, double hi) {
  if (!std::isfinite(lo) || lo < 0.0)
    throw DomainError("Segment: t_lo must be finite and nonnegative");
  if (!(lo < hi)) throw DomainError("Segment: need t_lo < t_hi");
}

// Shape-preserving slopes for cubic Hermite interpolation (PCHIP rule:
// weighted harmonic mean of adjacent secants, zero across local extrema).
std::vector<double> monotone_slopes(const std::vector<double>& t, const std::vector<double>& v) {
  const size_t n = t.size();
  std::vector<double> h(n - 1), d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    d[i] = (v[i + 1] - v[i]) / h[i];
  }
  std::vector<double> m(n, 0.0);
  if (n == 2) {
    m[0] = m[1] = d[0];
    return m;
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0.0) != (d[i] > 0.0)) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto endpoint = [](double h1, double h2, double d1, double d2) {
    double s = ((2.0 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
    if (s * d1 <= 0.0) return 0.0;
    if (d1 * d2 <= 0.0 && std::fabs(s) > 3.0 * std::fabs(d1)) return 3.0 * d1;
    return s;
  };
  m[0] = endpoint(h[0], h[1], d[0], d[1]);
  m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

}  // namespace

Segment Segment::power(double c, double exponent, double t_lo, double t_hi) {
  check_interval(t_lo, t_hi);
  if (!std::isfinite(c) || !std::isfinite(exponent))
    throw DomainError("Segment::power: parameters must be finite");
  Segment s;
  s.kind_ = SegmentKind::power;
  s.lo_ = t_lo;
  s.hi_ = t_hi;
  s.c_ = c;
  s.e_ = exponent;
  return s;
}

Segment Segment::exponential(double c, double rate, double t_lo, double t_hi) {
  check_interval(t_lo, t_hi);
  if (!std::isfinite(c) || !std::isfinite(rate))
    throw DomainError("Segment::exponential: parameters must be finite");
  Segment s;
  s.kind_ = SegmentKind::exponential;
  s.lo_ = t_lo;
  s.hi_ = t_hi;
  s.c_ = c;
  s.e_ = rate;
  return s;
}

Segment Segment::linear(double slope, double t_lo, double t_hi) {
  check_interval(t_lo, t_hi);
  if (!std::isfinite(slope)) throw DomainError("Segment::linear: slope must be finite");
  Segment s;
  s.kind_ = SegmentKind::linear;
  s.lo_ = t_lo;
  s.hi_ = t_hi;
  s.e_ = slope;
  return s;
}

Segment Segment::constant(double c, double t_lo, double t_hi) {
  check_interval(t_lo, t_hi);
  if (!std::isfinite(c)) throw DomainError("Segment::constant: value must be finite");
  Segment s;
  s.kind_ = SegmentKind::constant;
  s.lo_ = t_lo;
  s.hi_ = t_hi;
  s.c_ = c;
  return s;
}

Segment Segment::tabulated(std::vector<double> ts, std::vector<double> vs,
                           std::optional<std::vector<double>> slopes,
                           std::optional<double> t_hi) {
  if (ts.size() < 2 || ts.size() != vs.size())
    throw DomainError("Segment::tabulated: need >= 2 nodes with matching values");
  if (!std::is_sorted(ts.begin(), ts.end(),
                      [](double a, double b) { return a <= b; }))
    throw DomainError("Segment::tabulated: nodes must be strictly increasing");
  for (double x : ts)
    if (!std::isfinite(x)) throw DomainError("Segment::tabulated: nodes must be finite");
  for (double x : vs)
    if (!std::isfinite(x)) throw DomainError("Segment::tabulated: values must be finite");
  const double hi = t_hi.value_or(ts.back());
  check_interval(ts.front(), hi);
  if (std::isfinite(hi) && hi != ts.back())
    throw DomainError("Segment::tabulated: finite t_hi must equal the last node");
  Segment s;
  s.kind_ = SegmentKind::tabulated;
  s.lo_ = ts.front();
  s.hi_ = hi;
  if (slopes) {
    if (slopes->size() != ts.size())
      throw DomainError("Segment::tabulated: slope count must match node count");
    s.ms_ = std::move(*slopes);
  } else {
    s.ms_ = monotone_slopes(ts, vs);
  }
  s.ts_ = std::move(ts);
  s.vs_ = std::move(vs);
  return s;
}

double Segment::value(double t) const {
  switch (kind_) {
    case SegmentKind::power:
      return c_ * std::pow(t, e_);
    case SegmentKind::exponential:
      return c_ * std::exp(e_ * t);
    case SegmentKind::linear:
      return e_ * t;
    case SegmentKind::constant:
      return c_;
    case SegmentKind::tabulated: {
      if (t <= ts_.front()) return vs_.front();
      if (t >= ts_.back()) return vs_.back();  // flat extension when hi_ = inf
      const size_t i =
          std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin() - 1;
      const double h = ts_[i + 1] - ts_[i];
      const double s = (t - ts_[i]) / h;
      const double s2 = s * s, s3 = s2 * s;
      return vs_[i] * (2.0 * s3 - 3.0 * s2 + 1.0) + h * ms_[i] * (s3 - 2.0 * s2 + s) +
             vs_[i + 1] * (-2.0 * s3 + 3.0 * s2) + h * ms_[i + 1] * (s3 - s2);
    }
  }
  return 0.0;
}

double Segment::derivative(double t) const {
  switch (kind_) {
    case SegmentKind::power:
      return c_ * e_ * std::pow(t, e_ - 1.0);
    case SegmentKind::exponential:
      return c_ * e_ * std::exp(e_ * t);
    case SegmentKind::linear:
      return e_;
    case SegmentKind::constant:
      return 0.0;
    case SegmentKind::tabulated: {
      if (t <= ts_.front()) return ms_.front();
      if (t >= ts_.back()) return std::isfinite(hi_) ? ms_.back() : 0.0;
      const size_t i =
          std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin() - 1;
      const double h = ts_[i + 1] - ts_[i];
      const double s = (t - ts_[i]) / h;
      const double s2 = s * s;
      return (vs_[i] * (6.0 * s2 - 6.0 * s) + vs_[i + 1] * (6.0 * s - 6.0 * s2)) / h +
             ms_[i] * (3.0 * s2 - 4.0 * s + 1.0) + ms_[i + 1] * (3.0 * s2 - 2.0 * s);
    }
  }
  return 0.0;
}

Segment Segment::scaled(double factor) const {
  Segment s = *this;
  switch (kind_) {
    case SegmentKind::power:
    case SegmentKind::exponential:
    case SegmentKind::constant:
      s.c_ *= factor;
      break;
    case SegmentKind::linear:
      s.e_ *= factor;
      break;
    case SegmentKind::tabulated:
      for (double& v : s.vs_) v *= factor;
      for (double& m : s.ms_) m *= factor;
      break;
  }
  return s;
}

Segment Segment::abs_power(double p) const {
  if (!(p > 0.0)) throw DomainError("Segment::abs_power: exponent must be positive");
  Segment s = *this;
  switch (kind_) {
    case SegmentKind::power:
      s.c_ = std::pow(std::fabs(c_), p);
      s.e_ = e_ * p;
      break;
    case SegmentKind::exponential:
      s.c_ = std::pow(std::fabs(c_), p);
      s.e_ = e_ * p;
      break;
    case SegmentKind::linear:
      // |slope * t|^p = |slope|^p * t^p on t >= 0
      s.kind_ = SegmentKind::power;
      s.c_ = std::pow(std::fabs(e_), p);
      s.e_ = p;
      break;
    case SegmentKind::constant:
      s.c_ = std::pow(std::fabs(c_), p);
      break;
    case SegmentKind::tabulated:
      for (size_t i = 0; i < s.vs_.size(); ++i) {
        const double v = vs_[i];
        const double av = std::fabs(v);
        s.vs_[i] = std::pow(av, p);
        // chain rule; at zeros the transformed slope is forced to 0
        s.ms_[i] = av > 0.0 ? p * std::pow(av, p - 1.0) * (v > 0.0 ? 1.0 : -1.0) * ms_[i] : 0.0;
      }
      break;
  }
  return s;
}

PiecewiseProfile::PiecewiseProfile(std::vector<Segment> segments,
                                   std::optional<TailModel> declared_tail)
    : segments_(std::move(segments)), declared_tail_(std::move(declared_tail)) {
  if (segments_.empty()) throw DomainError("PiecewiseProfile: need at least one segment");
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (segments_[i].t_hi() != segments_[i + 1].t_lo())
      throw DomainError("PiecewiseProfile: segments must be contiguous");
  }
  breakpoints_.reserve(segments_.size() - 1);
  for (size_t i = 0; i + 1 < segments_.size(); ++i)
    breakpoints_.push_back(segments_[i].t_hi());
  for (const Segment& s : segments_) {
    if (s.kind() == SegmentKind::tabulated) {
      for (double t : s.nodes())
        if (t > s.t_lo() && t < s.t_hi()) hints_.push_back(t);
    }
  }
  hints_.insert(hints_.end(), breakpoints_.begin(), breakpoints_.end());
  std::sort(hints_.begin(), hints_.end());
  hints_.erase(std::unique(hints_.begin(), hints_.end()), hints_.end());
}

size_t PiecewiseProfile::segment_index(double t) const {
  if (t < domain_lo() || t >= domain_hi())
    throw DomainError("PiecewiseProfile: argument outside domain");
  const size_t i = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                   breakpoints_.begin();
  return i;
}

double PiecewiseProfile::value(double t) const { return segments_[segment_index(t)].value(t); }

double PiecewiseProfile::derivative(double t) const {
  return segments_[segment_index(t)].derivative(t);
}

std::pair<double, double> PiecewiseProfile::one_sided_derivative(double t) const {
  const size_t i = segment_index(t);
  const double right = segments_[i].derivative(t);
  if (i > 0 && t == segments_[i].t_lo()) return {segments_[i - 1].derivative(t), right};
  return {right, right};
}

double PiecewiseProfile::domain_lo() const { return segments_.front().t_lo(); }
double PiecewiseProfile::domain_hi() const { return segments_.back().t_hi(); }

bool PiecewiseProfile::is_breakpoint(double t) const {
  return std::binary_search(breakpoints_.begin(), breakpoints_.end(), t);
}

const std::vector<double>& PiecewiseProfile::breakpoints() const { return breakpoints_; }
const std::vector<double>& PiecewiseProfile::quadrature_hints() const { return hints_; }

std::vector<double> PiecewiseProfile::hints_in(double a, double b) const {
  if (!(a < b)) return {};
  auto lo = std::upper_bound(hints_.begin(), hints_.end(), a);
  auto hi = std::lower_bound(hints_.begin(), hints_.end(), b);
  if (hi < lo) return {};
  return {lo, hi};
}

const Segment& PiecewiseProfile::segment_at(double t) const {
  return segments_[segment_index(t)];
}

std::optional<TailModel> PiecewiseProfile::tail_class() const {
  if (declared_tail_) return declared_tail_;
  if (domain_hi() != kInf) return std::nullopt;  // no tail to speak of
  const Segment& last = segments_.back();
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

PiecewiseProfile PiecewiseProfile::scaled(double factor) const {
  std::vector<Segment> segs;
  segs.reserve(segments_.size());
  for (const Segment& s : segments_) segs.push_back(s.scaled(factor));
  return PiecewiseProfile(std::move(segs), declared_tail_);
}

PiecewiseProfile PiecewiseProfile::abs_power(double p) const {
  std::vector<Segment> segs;
  segs.reserve(segments_.size());
  for (const Segment& s : segments_) segs.push_back(s.abs_power(p));
  // a declared tail for f does not transform mechanically; drop it
  return PiecewiseProfile(std::move(segs), std::nullopt);
}

WarpingProfile::WarpingProfile(std::vector<Segment> segments,
                               std::optional<TailModel> declared_tail)
    : profile_(std::move(segments), std::move(declared_tail)) {
  if (profile_.domain_lo() != 0.0)
    throw DomainError("WarpingProfile: segments must start at t = 0");
  if (profile_.domain_hi() != kInf)
    throw DomainError("WarpingProfile: segments must extend to infinity");
  for (const Segment& s : profile_.segments()) {
    bool positive = true;
    switch (s.kind()) {
      case SegmentKind::power:
      case SegmentKind::exponential:
      case SegmentKind::constant:
        positive = s.coefficient() > 0.0;
        break;
      case SegmentKind::linear:
        positive = s.exponent() > 0.0;
        break;
      case SegmentKind::tabulated:
        for (double v : s.node_values()) positive = positive && v > 0.0;
        break;
    }
    if (!positive)
      throw DomainError("WarpingProfile: warping function must be positive on (0, inf)");
  }
}

double WarpingProfile::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("WarpingProfile: argument must be positive");
  return profile_.value(t);
}

double WarpingProfile::derivative(double t) const {
  if (!(t > 0.0)) throw DomainError("WarpingProfile: argument must be positive");
  return profile_.derivative(t);
}

std::pair<double, double> WarpingProfile::one_sided_derivative(double t) const {
  if (!(t > 0.0)) throw DomainError("WarpingProfile: argument must be positive");
  return profile_.one_sided_derivative(t);
}

}  // namespace warpcap
