#include "warpcap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpcap {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
    throw DomainError("QuadratureConfig: abs_tol must be positive and finite");
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
    throw DomainError("QuadratureConfig: rel_tol must be positive and finite");
  if (max_subdivisions < 1)
    throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
}

namespace {

// Gauss-Kronrod 7-15 nodes and weights (positive half; node 7 is the center).
// The odd-index Kronrod nodes are the embedded 7-point Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Piece {
  double lo, hi;
  double value, err;
};

// One Gauss-Kronrod 7-15 evaluation over [lo, hi].  Error estimate follows
// the usual rescaling by the integral of |f - mean| so smooth integrands are
// not flagged optimistically.
Piece gk15(const RealFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  double fv[15];
  const double fc = f(center);
  double res_kronrod = kKronrodW[7] * fc;
  double res_gauss = kGaussW[3] * fc;
  double res_abs = kKronrodW[7] * std::fabs(fc);
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    res_kronrod += kKronrodW[j] * (f1 + f2);
    res_abs += kKronrodW[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) res_gauss += kGaussW[(j - 1) / 2] * (f1 + f2);
  }

  const double mean = 0.5 * res_kronrod;
  double res_asc = kKronrodW[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    res_asc += kKronrodW[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));

  const double value = res_kronrod * half;
  res_asc *= half;
  double err = std::fabs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && err != 0.0)
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  const double round_floor =
      50.0 * std::numeric_limits<double>::epsilon() * res_abs * std::fabs(half) * 2.0;
  err = std::max(err, round_floor);
  return {lo, hi, value, err};
}

std::vector<double> interior_cuts(std::span<const double> breakpoints, double a, double b) {
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size());
  for (double t : breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  if (!std::is_sorted(cuts.begin(), cuts.end())) std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

IntegrationResult integrate(const RealFunction& f, double a, double b,
                            const QuadratureConfig& cfg,
                            std::span<const double> breakpoints) {
  cfg.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw DomainError("integrate: interval must be finite with a < b");

  const std::vector<double> cuts = interior_cuts(breakpoints, a, b);

  // Global refinement: always split the interval with the largest error
  // estimate until the summed error meets the tolerance.  Ties break on the
  // left endpoint so the order is deterministic.
  auto worse = [](const Piece& x, const Piece& y) {
    if (x.err != y.err) return x.err < y.err;
    return x.lo > y.lo;
  };
  std::vector<Piece> heap;  // active, splittable pieces
  double value = 0.0, err_active = 0.0;
  double frozen_value = 0.0, frozen_err = 0.0;  // pieces too narrow to split
  const double min_rel_width = 4.0 * std::numeric_limits<double>::epsilon();
  auto admit = [&](const Piece& p) {
    if (!std::isfinite(p.value))
      throw QuadratureError("integrate: non-finite integrand value",
                            value + frozen_value, err_active + frozen_err);
    const double w = p.hi - p.lo;
    if (w <= min_rel_width * std::max({1.0, std::fabs(p.lo), std::fabs(p.hi)})) {
      frozen_value += p.value;
      frozen_err += p.err;
      return;
    }
    value += p.value;
    err_active += p.err;
    heap.push_back(p);
    std::push_heap(heap.begin(), heap.end(), worse);
  };

  double prev = a;
  for (double c : cuts) {
    admit(gk15(f, prev, c));
    prev = c;
  }
  admit(gk15(f, prev, b));

  int splits = 0;
  bool budget_ok = true;
  auto tol_now = [&] {
    return std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(value + frozen_value));
  };
  while (!heap.empty() && err_active + frozen_err > tol_now()) {
    if (frozen_err > tol_now()) break;  // unsplittable pieces already exceed the budget
    if (splits >= cfg.max_subdivisions) {
      budget_ok = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Piece piece = heap.back();
    heap.pop_back();
    value -= piece.value;
    err_active -= piece.err;
    ++splits;
    const double mid = 0.5 * (piece.lo + piece.hi);
    admit(gk15(f, piece.lo, mid));
    admit(gk15(f, mid, piece.hi));
  }

  IntegrationResult out;
  out.value = value + frozen_value;
  out.err_estimate = err_active + frozen_err;
  out.subdivisions = splits;
  out.converged =
      budget_ok && std::isfinite(out.value) && out.err_estimate <= tol_now() * 1.0001 + 1e-300;
  return out;
}

double integrate_strict(const RealFunction& f, double a, double b,
                        const QuadratureConfig& cfg,
                        std::span<const double> breakpoints) {
  const IntegrationResult r = integrate(f, a, b, cfg, breakpoints);
  if (!r.converged)
    throw QuadratureError("integrate: tolerance not certified within subdivision budget",
                          r.value, r.err_estimate);
  return r.value;
}

std::vector<double> integrate_cumulative(const RealFunction& f,
                                         std::span<const double> points,
                                         const QuadratureConfig& cfg,
                                         std::span<const double> breakpoints) {
  if (points.size() < 2) throw DomainError("integrate_cumulative: need at least two points");
  if (!std::is_sorted(points.begin(), points.end()))
    throw DomainError("integrate_cumulative: points must be sorted ascending");

  std::vector<double> out(points.size(), 0.0);
  double acc = 0.0;
  auto bp_lo = breakpoints.begin();
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i], b = points[i + 1];
    if (b <= a) {
      out[i + 1] = acc;
      continue;
    }
    // slice of breakpoints inside (a, b); breakpoints are sorted
    while (bp_lo != breakpoints.end() && *bp_lo <= a) ++bp_lo;
    auto bp_hi = bp_lo;
    while (bp_hi != breakpoints.end() && *bp_hi < b) ++bp_hi;
    acc += integrate(f, a, b, cfg, {bp_lo, bp_hi}).value;
    out[i + 1] = acc;
  }
  return out;
}

double PowerEnvelope::at(double t) const { return coefficient * std::pow(t, exponent); }

TailModel TailModel::power_growth(double exponent, double valid_from) {
  if (!(valid_from > 0.0)) throw DomainError("TailModel: valid_from must be positive");
  TailModel m;
  m.kind = Kind::power;
  m.exponent = exponent;
  m.valid_from = valid_from;
  return m;
}

TailModel TailModel::power_decay(double alpha, double valid_from) {
  return power_growth(-alpha, valid_from);
}

TailModel TailModel::exponential_rate(double rate, double valid_from) {
  if (!(valid_from > 0.0)) throw DomainError("TailModel: valid_from must be positive");
  TailModel m;
  m.kind = Kind::exponential;
  m.rate = rate;
  m.valid_from = valid_from;
  return m;
}

TailModel TailModel::oscillating(PowerEnvelope lower, PowerEnvelope upper, double valid_from) {
  if (!(valid_from > 0.0)) throw DomainError("TailModel: valid_from must be positive");
  if (lower.coefficient < 0.0)
    throw DomainError("TailModel: oscillating lower envelope must be nonnegative");
  const bool ordered_at_start = lower.at(valid_from) <= upper.at(valid_from) * (1.0 + 1e-12);
  const bool ordered_at_infinity =
      lower.exponent < upper.exponent ||
      (lower.exponent == upper.exponent && lower.coefficient <= upper.coefficient * (1.0 + 1e-12));
  if (!ordered_at_start || !ordered_at_infinity)
    throw DomainError("TailModel: oscillating envelopes must satisfy lower <= upper on the tail");
  TailModel m;
  m.kind = Kind::oscillating;
  m.lower = lower;
  m.upper = upper;
  m.valid_from = valid_from;
  return m;
}

std::string TailModel::describe() const {
  char buf[160];
  switch (kind) {
    case Kind::power:
      std::snprintf(buf, sizeof buf, "~ C * t^%.6g for t >= %.6g", exponent, valid_from);
      break;
    case Kind::exponential:
      std::snprintf(buf, sizeof buf, "~ C * exp(%.6g * t) for t >= %.6g", rate, valid_from);
      break;
    case Kind::oscillating:
      std::snprintf(buf, sizeof buf,
                    "between %.6g * t^%.6g and %.6g * t^%.6g for t >= %.6g",
                    lower.coefficient, lower.exponent, upper.coefficient, upper.exponent,
                    valid_from);
      break;
  }
  return buf;
}

TailVerdict classify_tail_integral(const TailModel& tail) {
  switch (tail.kind) {
    case TailModel::Kind::power:
      return tail.exponent < -1.0 ? TailVerdict::converges : TailVerdict::diverges;
    case TailModel::Kind::exponential:
      return tail.rate < 0.0 ? TailVerdict::converges : TailVerdict::diverges;
    case TailModel::Kind::oscillating:
      if (tail.upper.exponent < -1.0 ||
          (tail.upper.coefficient == 0.0 && tail.lower.coefficient == 0.0))
        return TailVerdict::converges;
      if (tail.lower.exponent >= -1.0 && tail.lower.coefficient > 0.0)
        return TailVerdict::diverges;
      return TailVerdict::undetermined;
  }
  return TailVerdict::undetermined;
}

namespace {

// Integral of c * t^e over [T, infinity) for e < -1.
double power_tail_integral(double c, double e, double T) {
  return c * std::pow(T, e + 1.0) / (-(e + 1.0));
}

}  // namespace

ConvergenceResult integrate_improper(const RealFunction& f, double a,
                                     const TailModel& tail,
                                     const QuadratureConfig& cfg,
                                     std::span<const double> breakpoints) {
  cfg.validate();
  if (!std::isfinite(a)) throw DomainError("integrate_improper: lower limit must be finite");

  ConvergenceResult out;
  out.verdict = classify_tail_integral(tail);
  if (out.verdict != TailVerdict::converges) return out;

  const double target = 0.5 * cfg.abs_tol;
  double T = std::max(a, tail.valid_from);
  if (T <= 0.0) T = 1.0;
  const int max_doublings = tail.kind == TailModel::Kind::oscillating ? 14 : 200;

  double remainder = 0.0, remainder_err = 0.0;
  for (int it = 0;; ++it) {
    switch (tail.kind) {
      case TailModel::Kind::power: {
        // Estimate the leading coefficient from f itself at the cut.
        const double c_est = f(T) * std::pow(T, -tail.exponent);
        remainder = power_tail_integral(c_est, tail.exponent, T);
        remainder_err = std::fabs(remainder);
        break;
      }
      case TailModel::Kind::exponential: {
        remainder = f(T) / (-tail.rate);
        remainder_err = std::fabs(remainder);
        break;
      }
      case TailModel::Kind::oscillating: {
        const double lo = tail.lower.exponent < -1.0
                              ? power_tail_integral(tail.lower.coefficient, tail.lower.exponent, T)
                              : 0.0;
        const double hi = tail.upper.coefficient == 0.0
                              ? 0.0
                              : power_tail_integral(tail.upper.coefficient, tail.upper.exponent, T);
        remainder = 0.5 * (lo + hi);
        remainder_err = 0.5 * (hi - lo);
        break;
      }
    }
    if (remainder_err < target || it >= max_doublings || T >= 1e15) break;
    T *= 2.0;
  }

  if (T <= a) {
    // Degenerate: nothing left to integrate numerically.
    out.value = remainder;
    out.err_estimate = remainder_err;
    out.quadrature_ok = true;
    return out;
  }

  const IntegrationResult finite_part = integrate(f, a, T, cfg, breakpoints);
  out.value = finite_part.value + remainder;
  out.err_estimate = finite_part.err_estimate + remainder_err;
  out.quadrature_ok = finite_part.converged;
  return out;
}

}  // namespace warpcap
