#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpcap/errors.hpp"

namespace warpcap {

using RealFunction = std::function<double(double)>;

// Tolerances for the adaptive quadrature engine.  The engine accepts an
// interval once its local error estimate drops below the interval's
// proportional share of max(abs_tol, rel_tol * |integral|).
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;

  void validate() const;  // throws DomainError on non-positive entries
};

struct IntegrationResult {
  double value = 0.0;
  double err_estimate = 0.0;
  bool converged = false;   // tolerance certified within the subdivision budget
  int subdivisions = 0;
};

// Adaptive Gauss-Kronrod 7-15 over [a, b].  `breakpoints` are mandatory
// subdivision points (kinks / jumps of the integrand); points outside (a, b)
// are ignored.  Subdivision is deterministic (depth-first, left to right).
// Nodes are strictly interior, so integrands only defined on the open
// interval are fine.  Throws QuadratureError if the integrand evaluates to a
// non-finite value.
IntegrationResult integrate(const RealFunction& f, double a, double b,
                            const QuadratureConfig& cfg = {},
                            std::span<const double> breakpoints = {});

// As integrate(), but throws QuadratureError when the tolerance could not be
// certified.
double integrate_strict(const RealFunction& f, double a, double b,
                        const QuadratureConfig& cfg = {},
                        std::span<const double> breakpoints = {});

// Cumulative integrals along a sorted grid: result[i] = integral from
// points[0] to points[i] (result[0] == 0).  Each consecutive pair is
// integrated once; `breakpoints` must be sorted and is merged into the grid.
std::vector<double> integrate_cumulative(const RealFunction& f,
                                         std::span<const double> points,
                                         const QuadratureConfig& cfg = {},
                                         std::span<const double> breakpoints = {});

// One arm of a bounded-oscillation envelope: t -> coefficient * t^exponent.
struct PowerEnvelope {
  double coefficient = 1.0;
  double exponent = 0.0;

  double at(double t) const;
};

// Asymptotic behaviour of a function as t -> infinity, valid on
// [valid_from, infinity).  Conventions:
//   power:        f(t) ~ C * t^exponent          (signed growth exponent)
//   exponential:  f(t) ~ C * exp(rate * t)       (signed rate)
//   oscillating:  lower.at(t) <= f(t) <= upper.at(t), both envelopes power-law
struct TailModel {
  enum class Kind { power, exponential, oscillating };

  Kind kind = Kind::power;
  double exponent = 0.0;       // power
  double rate = 0.0;           // exponential
  PowerEnvelope lower{};       // oscillating
  PowerEnvelope upper{};
  double valid_from = 1.0;

  static TailModel power_growth(double exponent, double valid_from = 1.0);
  // Decay written with a positive rate: t^{-alpha} has decay_alpha = alpha.
  static TailModel power_decay(double alpha, double valid_from = 1.0);
  static TailModel exponential_rate(double rate, double valid_from = 1.0);
  static TailModel oscillating(PowerEnvelope lower, PowerEnvelope upper, double valid_from);

  std::string describe() const;
};

enum class TailVerdict { converges, diverges, undetermined };

// Does the improper integral of a nonnegative function with this tail
// converge?   power: exponent < -1.   exponential: rate < 0.
// oscillating: converges if the upper envelope is integrable, diverges if the
// lower envelope is nonnegative and non-integrable, otherwise undetermined.
TailVerdict classify_tail_integral(const TailModel& tail);

struct ConvergenceResult {
  TailVerdict verdict = TailVerdict::undetermined;
  std::optional<double> value;       // present iff verdict == converges
  double err_estimate = 0.0;
  bool quadrature_ok = false;        // finite part certified to tolerance

  bool converges() const { return verdict == TailVerdict::converges; }
  bool diverges() const { return verdict == TailVerdict::diverges; }
};

// Integral of f over [a, infinity) for a nonnegative integrand with known
// tail behaviour.  Divergent / undetermined tails short-circuit without
// evaluating f.  Convergent tails: numeric integral over [a, T] plus an
// analytic tail remainder with the leading coefficient estimated from f(T);
// T is doubled until the remainder bound drops below abs_tol / 2 (or a cap is
// hit, in which case the remainder uncertainty stays in err_estimate).
ConvergenceResult integrate_improper(const RealFunction& f, double a,
                                     const TailModel& tail,
                                     const QuadratureConfig& cfg = {},
                                     std::span<const double> breakpoints = {});

}  // namespace warpcap
