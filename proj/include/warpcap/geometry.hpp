#pragma once

#include <optional>
#include <vector>

#include "warpcap/numerics.hpp"
#include "warpcap/profiles.hpp"

namespace warpcap {

// Conjugate exponent pair: p > 1, q = p / (p - 1), so 1/p + 1/q = 1.
struct Exponent {
  double p;
  double q;

  explicit Exponent(double p_value);
  Exponent(double p_value, double q_value);  // validates conjugacy to 1e-12
};

// Area of the unit (m-1)-sphere: 2 pi^{m/2} / Gamma(m/2).
double unit_sphere_area(int dim);

// Rotationally symmetric manifold: metric dt^2 + h(t)^2 dtheta^2 on
// (0, inf) x S^{m-1}, completed at the pole t = 0.
struct ModelManifold {
  int dim;                // m >= 2
  WarpingProfile h;
  double base_radius = 1.0;  // anchor for potentials
};

// Derived geometric quantities with cached cumulative volume.
// Boundary area     A(t) = omega_{m-1} h(t)^{m-1}
// Ball volume       V(t) = int_0^t A
// Capacity kernels  a_p(t) = A(t)^{-1/(p-1)}
//                   b_p(t; r1) = ((t - r1) / (V(t) - V(r1)))^{1/(p-1)}
class ModelGeometry {
 public:
  explicit ModelGeometry(ModelManifold model, QuadratureConfig cache_cfg = {
                             .abs_tol = 1e-12, .rel_tol = 1e-12, .max_subdivisions = 4000});

  int dim() const { return model_.dim; }
  double sphere_area() const { return omega_; }
  double base_radius() const { return model_.base_radius; }
  const WarpingProfile& warping() const { return model_.h; }
  const QuadratureConfig& quad_config() const { return cfg_; }

  double area(double t) const;             // t > 0
  double area_derivative(double t) const;  // right-derivative at breakpoints
  double volume(double t) const;
  double volume_between(double r1, double r2) const;  // cancellation-free
  double a_p(const Exponent& e, double t) const;
  double b_p(const Exponent& e, double r1, double t) const;  // t > r1 >= 0

  // Tail models transformed from the warping profile's tail.  The *_value
  // variants ignore a declared (conservative) tail and use the concrete last
  // segment; they back the analytic remainders of improper integrals while
  // the plain variants back convergence verdicts.
  std::optional<TailModel> area_tail() const;
  std::optional<TailModel> a_p_tail(const Exponent& e) const;
  std::optional<TailModel> a_p_value_tail(const Exponent& e) const;

  std::vector<double> hints_in(double a, double b) const;

 private:
  double partial_volume(double from, double to) const;

  ModelManifold model_;
  double omega_;
  QuadratureConfig cfg_;
  std::vector<double> vol_breaks_;  // 0 and every finite quadrature hint
  std::vector<double> vol_cum_;     // V at vol_breaks_
};

// Integral of a_p over [r1, r2], 0 < r1 < r2 < inf (direct quadrature).
double ap_integral(const ModelGeometry& g, const Exponent& e, double r1, double r2);

// Radial potential f(r) = int_{base}^{r} a_p(s) ds, the distributional
// solution of the p-Laplace equation outside the base ball.  Holds a
// reference to the geometry; keep the geometry alive while using it.
class EvansPotential {
 public:
  EvansPotential(const ModelGeometry& g, const Exponent& e);

  double operator()(double r) const;            // r >= base_radius
  double derivative(double r) const;            // = a_p(r)
  double integral_between(double r1, double r2) const;  // both >= base_radius

  // f(inf): value present iff the tail integral converges.
  const ConvergenceResult& limit_at_infinity() const { return limit_; }

  // Smallest r with f(r) = y (f is strictly increasing); nullopt when y is
  // above the reachable range.
  std::optional<double> inverse(double y) const;

  const ModelGeometry& geometry() const { return g_; }
  const Exponent& exponent() const { return e_; }

 private:
  double partial(double from, double to) const;

  const ModelGeometry& g_;
  Exponent e_;
  std::vector<double> breaks_;  // base and later quadrature hints
  std::vector<double> cum_;     // f at breaks_
  ConvergenceResult limit_;
};

// Radial function given by value and derivative callables (analytic
// derivatives keep finite-difference noise out of verification loops).
struct RadialFunction {
  RealFunction value;
  RealFunction derivative;
};

// Flux form F(r) = A(r) |u'(r)|^{p-2} u'(r).
double p_flux(const ModelGeometry& g, const Exponent& e, const RadialFunction& u, double r);

// Finite-difference estimate of the radial p-Laplacian
//   Delta_p u (r) = (A |u'|^{p-2} u')' / A
// via a central difference of the flux form (one-sided second-order stencil
// when a profile joint falls inside the stencil).
double radial_p_laplacian(const ModelGeometry& g, const Exponent& e, const RadialFunction& u,
                          double r, double step_scale = 1e-5);

}  // namespace warpcap
