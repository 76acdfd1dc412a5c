#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "warpcap/numerics.hpp"

namespace warpcap {

enum class SegmentKind { power, exponential, linear, constant, tabulated };

// One piece of a piecewise-defined radial function on [t_lo, t_hi)
// (right-continuous; t_hi may be +infinity).
//   power:        c * t^e
//   exponential:  c * exp(e * t)
//   linear:       e * t                (slope through the origin)
//   constant:     c
//   tabulated:    monotone cubic Hermite through (t_i, v_i); optional
//                 explicit slopes override the shape-preserving defaults.
//                 With t_hi = inf the value extends flat past the last node.
class Segment {
 public:
  static Segment power(double c, double exponent, double t_lo, double t_hi);
  static Segment exponential(double c, double rate, double t_lo, double t_hi);
  static Segment linear(double slope, double t_lo, double t_hi);
  static Segment constant(double c, double t_lo, double t_hi);
  static Segment tabulated(std::vector<double> ts, std::vector<double> vs,
                           std::optional<std::vector<double>> slopes = {},
                           std::optional<double> t_hi = {});

  SegmentKind kind() const { return kind_; }
  double t_lo() const { return lo_; }
  double t_hi() const { return hi_; }
  double coefficient() const { return c_; }
  double exponent() const { return e_; }
  const std::vector<double>& nodes() const { return ts_; }
  const std::vector<double>& node_values() const { return vs_; }
  const std::vector<double>& node_slopes() const { return ms_; }

  double value(double t) const;       // t assumed inside [t_lo, t_hi)
  double derivative(double t) const;

  Segment scaled(double factor) const;         // factor * segment
  Segment abs_power(double s) const;           // |segment|^s (s > 0)

 private:
  Segment() = default;

  SegmentKind kind_ = SegmentKind::constant;
  double lo_ = 0.0, hi_ = 0.0;
  double c_ = 0.0, e_ = 0.0;
  std::vector<double> ts_, vs_, ms_;
};

// Contiguous run of segments; right-continuous at interior breakpoints.
// An optional declared TailModel overrides the tail derived from the last
// segment (used when the segment list truncates a known asymptotic pattern).
class PiecewiseProfile {
 public:
  explicit PiecewiseProfile(std::vector<Segment> segments,
                            std::optional<TailModel> declared_tail = {});

  double operator()(double t) const { return value(t); }
  double value(double t) const;               // throws DomainError outside domain
  double derivative(double t) const;          // right-derivative at breakpoints
  std::pair<double, double> one_sided_derivative(double t) const;  // {left, right}

  double domain_lo() const;
  double domain_hi() const;                   // may be +infinity
  bool is_breakpoint(double t) const;
  const std::vector<double>& breakpoints() const;      // interior segment joints
  const std::vector<double>& quadrature_hints() const; // joints + tabulated nodes
  std::vector<double> hints_in(double a, double b) const;

  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment_at(double t) const;

  // Tail behaviour as t -> infinity: the declared model if present, else
  // derived from the last segment; nullopt when the last segment is
  // tabulated (no analytic form to extend).
  std::optional<TailModel> tail_class() const;
  const std::optional<TailModel>& declared_tail() const { return declared_tail_; }

  PiecewiseProfile scaled(double factor) const;
  PiecewiseProfile abs_power(double s) const;

 private:
  size_t segment_index(double t) const;

  std::vector<Segment> segments_;
  std::vector<double> breakpoints_;
  std::vector<double> hints_;
  std::optional<TailModel> declared_tail_;
};

// Signed radial coefficient functions (densities, vector-field profiles).
using RadialProfile = PiecewiseProfile;

// Warping function h of a rotationally symmetric metric dt^2 + h(t)^2 dtheta^2.
// Must cover (0, infinity) and stay positive there.
class WarpingProfile {
 public:
  explicit WarpingProfile(std::vector<Segment> segments,
                          std::optional<TailModel> declared_tail = {});

  double operator()(double t) const;   // requires t > 0
  double derivative(double t) const;
  std::pair<double, double> one_sided_derivative(double t) const;

  std::optional<TailModel> tail_class() const { return profile_.tail_class(); }
  const PiecewiseProfile& piecewise() const { return profile_; }

 private:
  PiecewiseProfile profile_;
};

}  // namespace warpcap
