#pragma once

#include <random>
#include <span>
#include <vector>

#include "warpcap/geometry.hpp"

namespace warpcap {

// Value at radius r of the optimal annulus cutoff
//   phi(r) = (int_r^{r2} a_p) / (int_{r1}^{r2} a_p),
// which is 1 inside B_{r1}, 0 outside B_{r2}, and p-energy minimizing among
// radial cutoffs of the annulus.
double phi_eval(const ModelGeometry& g, const Exponent& e, double r1, double r2, double r);

// Its p-energy (int_{r1}^{r2} a_p)^{1-p} -- the annulus capacity.
double phi_energy(const ModelGeometry& g, const Exponent& e, double r1, double r2);

// Same energy by direct quadrature of |phi'|^p over the annulus; an
// independent route used to cross-check the closed form.
double phi_energy_quadrature(const ModelGeometry& g, const Exponent& e, double r1, double r2);

// Energy bound for the slope-controlled ramp cutoff:
//   ((1+eps)/(r2-r1))^p * int_{r1}^{r2} A.
double xi_energy_bound(const ModelGeometry& g, const Exponent& e, double r1, double r2,
                       double epsilon);

// Explicit C^1 ramp from 1 to 0 on [r1, r2] with |xi'| <= (1+eps)/(r2-r1):
// straight middle piece with parabolic corner rounding of just the width
// that the slope budget allows.  Requires 0 < eps < 1.
RadialProfile mollified_xi(double r1, double r2, double epsilon);

// p-energy int_{r1}^{r2} |psi'|^p A of a custom radial cutoff.  Validates
// admissibility: psi(r1) = 1 and psi(r2) = 0 (to 1e-9), values within [0, 1]
// on a sample grid, and total variation int |psi'| >= 1.
double custom_energy(const ModelGeometry& g, const Exponent& e, const RadialProfile& psi,
                     double r1, double r2);

// Plateau truncation of a nondecreasing exhaustion value f:
//   max(min(2r - f, r), 0)   (equals r where f <= r, 0 where f >= 2r).
double plateau_value(double f_at_point, double r);

// The same truncation of a radial potential, materialized as a profile:
// constant r inside f^{-1}(r), a monotone descent with exact slopes -a_p in
// between, constant 0 outside f^{-1}(2r).  Requires the potential to reach 2r.
RadialProfile plateau_profile(const EvansPotential& f, double r, int nodes = 129);

// Random piecewise-linear admissible cutoff on [r1, r2] (1 at r1, 0 at r2,
// nonincreasing), for stress-testing energy optimality.
RadialProfile random_admissible_cutoff(double r1, double r2, int knots, std::mt19937_64& rng);

struct EnergySweepRow {
  double r = 0.0;
  double phi_energy = 0.0;  // optimal cutoff energy on [r, factor*r]
  double xi_bound = 0.0;    // ramp bound on the same annulus
  double ratio = 0.0;       // phi_energy / xi_bound
};

// Energies of nested annuli [r, factor*r] along a radius ladder.
std::vector<EnergySweepRow> energy_sweep(const ModelGeometry& g, const Exponent& e,
                                         std::span<const double> radii, double epsilon,
                                         double factor = 2.0);

}  // namespace warpcap
