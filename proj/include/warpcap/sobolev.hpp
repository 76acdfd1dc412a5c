#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpcap/geometry.hpp"

namespace warpcap {

// Constants of a Euclidean-type Sobolev inequality
//   ||eta||_p^q <= S_M^q ||grad eta||_q^q,   p = m q / (m - q),
// together with the volume constant gamma of the almost-Euclidean lower
// bound V(B_r) >= gamma r^m that such manifolds satisfy.
struct SobolevParams {
  int m = 3;
  double q = 2.0;
  double p_sob = 6.0;  // m q / (m - q)
  double S_M = 1.0;
  double gamma = 1.0;
};

// Validates 1 < q < m, S_M > 0, gamma > 0 and fills p_sob.
SobolevParams sobolev_params(int m, double q, double S_M, double gamma);

// C_S = gamma^{-(m-q)/(m(q-1))} S_M^{q/(q-1)}, the constant bounding the
// area-decay products below.
double sobolev_area_constant(const SobolevParams& params);

// Plugging the optimal annulus cutoff into the Sobolev inequality yields
//   V(B_{r1})^{q/p} <= S_M^q / (int_{r1}^{r2} a_q)^{q-1}.
struct CapacityRelation {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs (1 + tol)
};

// r2 may be +infinity; the kernel integral is then improper.  A divergent
// kernel tail drives rhs to 0, so `holds` fails for every ball of positive
// volume -- the contradiction showing such a model cannot support the
// inequality.  Throws DomainError when the tail cannot be classified and
// QuadratureError when an integral fails to certify.
CapacityRelation sobolev_capacity_relation(const SobolevParams& params, const ModelGeometry& g,
                                           double r1, double r2, double tol = 1e-9);

// Area-decay products r^{(m-q)/(q-1)} int_r^inf a_q at the given radii
// (positive, strictly increasing).  Computed as one shared improper tail
// minus a cumulative sweep.  Divergent kernel tail: every product is
// +infinity.  Undetermined tail: DomainError.
std::vector<double> lower_area_products(const ModelGeometry& g, double q,
                                        std::span<const double> radii);

struct LowerAreaCheck {
  double c_s = 0.0;
  double max_product = 0.0;
  bool holds = false;  // every product <= c_s (1 + tol)
  std::vector<double> radii;
  std::vector<double> products;
};

// Checks the area-decay bound product(r) <= C_S on the grid.
LowerAreaCheck lower_area_check(const SobolevParams& params, const ModelGeometry& g,
                                std::span<const double> radii, double tol = 1e-9);

// Rotationally symmetric manifold whose warping function alternates between
// the slow branch t^beta (on [4k+3, 4k+4]) and the fast branch H t (on
// [4k+1, 4k+2]).  The fast stretches keep the volume almost Euclidean while
// the slow stretches fatten the kernel integral, so the area-decay bound
// fails even though the volume bound holds and the kernel is integrable.
struct CounterexampleSpec {
  int m = 3;
  double q = 1.5;
  double beta = 0.5;   // in ((q-1)/(m-1), (m-q)/(m-1))
  double H = 5.0;      // > counterexample_h_threshold(m, gamma), and >= 1
  double gamma = 1.0;  // target volume constant, V(B_r) >= gamma r^m
  double smoothing_width = 0.1;  // width of the blend window inside each gap
  double extent = 1100.0;        // alternation realized out to (at least) here
};

// (1/4) (m 10^m gamma / omega_{m-1})^{1/(m-1)}: fast-branch slopes above
// this keep the volume constant gamma attainable.
double counterexample_h_threshold(int m, double gamma);

// Builds the alternating profile.  Between prescribed stretches the two
// neighbouring branches are blended C^1 inside a window of the given width
// (cubic smoothstep weights, tabulated with exact blend slopes); everywhere
// outside the windows the profile equals one branch exactly.  Past the last
// realized period the slow branch continues to infinity, and the declared
// tail records the oscillation envelopes [t^beta, H t].  The floor
// h(t) >= t^beta is verified on a sample grid for t >= 1 (near the pole
// h(t) = t, so the floor necessarily fails below t = 1).
ModelManifold build_counterexample(const CounterexampleSpec& spec);

struct CounterexampleReport {
  // (i) volume stays almost Euclidean: V(r) >= gamma r^m on the grid
  bool volume_ok = false;
  double min_volume_ratio = 0.0;  // min V(r) / (gamma r^m)
  // (ii) the kernel a_q is integrable at infinity
  bool tail_convergent = false;
  std::optional<double> aq_integral;  // int_base^inf a_q when certified
  // (iii) the area-decay products grow along the starts of the slow
  // stretches -- evidence (not proof) that no constant C_S can bound them
  bool products_increasing = false;
  bool products_tenfold = false;  // last >= 10 x first along the subsequence
  double product_growth = 0.0;    // last / first
  bool counterexample_confirmed = false;  // all three checks in the expected state

  std::vector<double> radii;  // volume grid
  std::vector<double> volume_ratios;
  std::vector<double> product_radii;
  std::vector<double> products;
  std::string note;  // inconclusive steps are spelled out, never dropped
};

// Runs the three checks at 200 volume radii and along the slow-stretch
// subsequence up to r_max.  r_max must not exceed the realized alternation
// (4 * ceil((extent - 4) / 4)); beyond it the profile is a single slow
// branch and the volume bound would be tested outside its design range.
CounterexampleReport verify_counterexample(const ModelGeometry& g, const CounterexampleSpec& spec,
                                           double r_max);

}  // namespace warpcap
