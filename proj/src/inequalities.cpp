#include "warpcap/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "warpcap/errors.hpp"
#include "warpcap/random.hpp"

namespace warpcap {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, double p) {
  if (!(p > 1.0)) throw DomainError("vector inequality: exponent must exceed 1");
  if (x.empty() || x.size() != y.size()) {
    throw DomainError("vector inequality: vectors must be nonempty and of equal dimension");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("vector inequality: entries must be finite");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("vector inequality: entries must be finite");
  }
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// the weight whose maximum is located below
double weight(double A, double t) { return 2.0 * t * std::pow(A + t, -1.5); }

// analytic derivative of the weight, deliberately unfactored: locating its
// zero must not presuppose where the maximum sits
double weight_derivative(double A, double t) {
  return 2.0 * std::pow(A + t, -1.5) - 3.0 * t * std::pow(A + t, -2.5);
}

}  // namespace

double psi(std::span<const double> x, std::span<const double> y, double p) {
  check_pair(x, y, p);
  double diff2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) diff2 += (x[i] - y[i]) * (x[i] - y[i]);
  if (p >= 2.0) return std::pow(std::sqrt(diff2), p);
  if (diff2 == 0.0) return 0.0;  // covers x = y = 0, where the quotient is a limit
  const double norms = norm(x) + norm(y);
  return diff2 / std::pow(norms, 2.0 - p);
}

double lindqvist_lhs(std::span<const double> x, std::span<const double> y, double p) {
  check_pair(x, y, p);
  const double nx = norm(x), ny = norm(y);
  const double cx = nx > 0.0 ? std::pow(nx, p - 2.0) : 0.0;
  const double cy = ny > 0.0 ? std::pow(ny, p - 2.0) : 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    acc += (cx * x[i] - cy * y[i]) * (x[i] - y[i]);
  }
  return acc;
}

CpEstimate estimate_cp(double p, int dimension, int sample_count, uint64_t seed) {
  if (!(p > 1.0)) throw DomainError("estimate_cp: exponent must exceed 1");
  if (dimension < 1) throw DomainError("estimate_cp: dimension must be at least 1");
  if (sample_count < 1000) throw DomainError("estimate_cp: need at least 1000 samples");

  std::mt19937_64 rng(seed);
  std::vector<double> x(dimension), y(dimension);
  double inf = std::numeric_limits<double>::infinity();
  long valid = 0;

  auto consider = [&]() {
    const double ps = psi(x, y, p);
    if (!(ps > 1e-280)) return;
    inf = std::min(inf, lindqvist_lhs(x, y, p) / (2.0 * ps));
    ++valid;
  };

  for (int s = 0; s < sample_count; ++s) {
    for (double& v : x) v = standard_normal(rng);
    for (double& v : y) v = standard_normal(rng);
    consider();
  }
  if (valid < sample_count / 2) throw DomainError("estimate_cp: degenerate sampling");

  // deterministic adversarial pairs along the first axis, over several
  // scales: antipodal (minimizers for p >= 2), nearly equal parallel
  // (minimizers for p < 2), and one-sided zero pairs
  for (double scale : {1e-8, 1.0, 1e8}) {
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(y.begin(), y.end(), 0.0);
    x[0] = scale;
    y[0] = -scale;
    consider();
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      y[0] = scale * (1.0 + eps);
      consider();
      y[0] = scale * (1.0 - eps);
      consider();
    }
    y[0] = 0.0;
    consider();
  }

  return CpEstimate{inf, p, dimension, sample_count, seed};
}

bool negative_part_bound(double du_p, double dv_p, double t, double A) {
  if (!(A > 1.0)) throw DomainError("negative_part_bound: need A > 1");
  if (!(du_p >= 0.0) || !(dv_p >= 0.0) || !(t >= 0.0)) {
    throw DomainError("negative_part_bound: need du_p, dv_p, t nonnegative");
  }
  const double sum = du_p + dv_p;
  return weight(A, t) * sum <= (2.0 / std::sqrt(A)) * sum;
}

WeightMaximum weight_maximum(double A) {
  if (!(A > 0.0) || !std::isfinite(A)) throw DomainError("weight_maximum: need finite A > 0");

  // golden-section pass: unimodal on (0, inf), maximum well inside [0, 8A]
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 8.0 * A;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = weight(A, c), fd = weight(A, d);
  for (int i = 0; i < 120 && hi - lo > 1e-9 * A; ++i) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = weight(A, d);
    } else {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = weight(A, c);
    }
  }
  const double coarse = 0.5 * (lo + hi);

  // the weight is flat to machine precision within ~1e-7 of the top, so
  // sharpen by bisecting the sign of the analytic derivative
  double blo = coarse * 0.9, bhi = coarse * 1.1;
  for (int i = 0; i < 60 && !(weight_derivative(A, blo) > 0.0); ++i) blo *= 0.5;
  for (int i = 0; i < 60 && !(weight_derivative(A, bhi) < 0.0); ++i) bhi *= 2.0;
  if (!(weight_derivative(A, blo) > 0.0) || !(weight_derivative(A, bhi) < 0.0)) {
    throw DomainError("weight_maximum: could not bracket the derivative sign change");
  }
  for (int i = 0; i < 200 && bhi - blo > 1e-13 * (A + bhi); ++i) {
    const double mid = 0.5 * (blo + bhi);
    if (weight_derivative(A, mid) > 0.0) {
      blo = mid;
    } else {
      bhi = mid;
    }
  }
  const double argmax = 0.5 * (blo + bhi);

  bool increasing = true;
  const int kGrid = 64;
  double prev = 0.0;  // weight(A, 0) = 0
  for (int i = 1; i <= kGrid; ++i) {
    const double t = argmax * 0.99 * i / kGrid;
    const double v = weight(A, t);
    increasing = increasing && v > prev;
    prev = v;
  }

  return WeightMaximum{argmax, weight(A, argmax), increasing};
}

}  // namespace warpcap
