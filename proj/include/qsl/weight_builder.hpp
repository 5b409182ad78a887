#pragma once

// Escape weights for nonquadratic polynomial symbols: the Hamiltonian flow
// of Im p0 with its variational equation, the mollified real part
// g(|X - c|^2 / eps) * Re p0(X), the weight
//
//   G_eps(X) = int_0^T (1 - t/T) (Re p0)_eps(flow(t, X)) dt
//
// with its exact gradient (variational chain rule, differentiated under the
// integral), gluing over several critical points by radial bump cutoffs,
// and the grid certification of the weight's defining lower bounds.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"

namespace qsl {

// The radial cutoff: g = 1 on [0,1], g(t) = 1/t on [2,inf), and a quintic
// bridge on (1,2) matching value, slope, and curvature at both ends
// (g(1+u) = 1 - (31/8)u^3 + (11/2)u^4 - (17/8)u^5). Decreasing, C^2,
// |g'| <= 1.1 everywhere.
struct CutoffG {
  double operator()(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;
};

struct FlowState {
  Vec X_t;   // e^{t H_{Im p0}} X
  Mat DX_t;  // Jacobian of the flow map at X
  double t = 0.0;
};

// Integrates dX/ds = H_{Im p0}(X) and dDX/ds = dH(X_s) DX from (X, I).
// Either sign of t. OdeStepFailure propagates from the integrator.
FlowState flow(const PolynomialSymbol& p0, const Vec& X, double t,
               double tol_ode = 1e-10);

// g(|X - center|^2 / eps) * Re p0(X); center defaults to the origin.
double mollified_repart(const PolynomialSymbol& p0, double eps, const Vec& X,
                        const Vec* center = nullptr);

// G_eps(X) and its gradient. Gauss-Legendre in t with node doubling from
// min_nodes until two levels agree to tol_quad (relative); each level reads
// the flow off one ODE sweep. The gradient integrand is
// (1 - t/T) DX_t^T [g'(u) (2/eps)(Y-c) Re p0(Y) + g(u) Re grad p0(Y)].
std::pair<double, Vec> weight_G_eps(const PolynomialSymbol& p0, double eps, double T,
                                    const Vec& X, double tol_ode = 1e-10,
                                    double tol_quad = 1e-8, const Vec* center = nullptr,
                                    int min_nodes = 16);

// Value-only evaluation (skips the variational equation; about 5x cheaper).
double weight_G_eps_value(const PolynomialSymbol& p0, double eps, double T,
                          const Vec& X, double tol_ode = 1e-10,
                          double tol_quad = 1e-8, const Vec* center = nullptr,
                          int min_nodes = 16);

// Glued weight sum_j chi_j(X) G_{j,eps}(X), where G_{j,eps} mollifies
// around center j and chi_j is a radial quintic bump: 1 on
// |X-c_j| <= bump_radius/2, 0 from bump_radius on. With one center and
// bump_radius = 0 this is exactly weight_G_eps.
struct WeightField {
  PolynomialSymbol p0;
  double epsilon = 0.0;
  double T = 0.0;
  std::vector<Vec> centers;   // empty means the origin
  double bump_radius = 0.0;   // 0: no gluing (single center only)
  double tol_ode = 1e-10;
  double tol_quad = 1e-8;

  double value(const Vec& X) const;
  std::pair<double, Vec> value_gradient(const Vec& X) const;
};

// Grid specification for the certification: shells around each center at
// the given radii (default sqrt(eps)/2, then sqrt(eps) doubling up to 1/C),
// sampled along all coordinate axes plus `angular` seeded random directions.
struct PropGrid {
  std::vector<double> radii;
  int angular = 16;
  double C = 1.0;  // outer scale: shells stop at 1/C
  std::uint64_t seed = 99;
};

struct PropItem {
  bool pass = false;
  double fitted = 0.0;  // the certified constant for this item
  double worst = 0.0;   // extremal ratio over the grid
  Vec worst_at;
  std::string note;
};

struct PropReport {
  double epsilon = 0.0, delta = 0.0, T = 0.0;
  int grid_points = 0;
  std::array<PropItem, 5> items;
  double c_tilde = 0.0;  // rotation picked by the item-5 scan
  bool all_pass() const;
};

// Certifies, on the grid, that the weight behaves as an escape function:
//  (1) |G_eps| = O(eps) and bounded second derivatives,
//  (2) |grad G_eps| <= C (fitted) * dist(X, centers) where dist <= sqrt(eps),
//  (3) |grad G_eps| <= C (fitted) * sqrt(eps)       where dist >= sqrt(eps),
//  (4) |p0(X + i delta H_G(X))| >= (delta/C~) min(dist^2, eps) with
//      C~ = delta / m4 fitted; fails by definition at delta = 0,
//  (5) some rotation c~ in {+-1/4, +-1/2, +-1, +-2, +-4} makes
//      Re((1 - i c~ delta eps / dist^2) p0(X + i delta H_G)) positive where
//      dist >= sqrt(eps); vacuous (pass) at delta = 0.
// Constants are fitted on the grid and certify nothing beyond it. With
// strict = true a failed item throws FitFailure instead.
PropReport verify_prop1(const PolynomialSymbol& p0, const std::vector<Vec>& centers,
                        double eps, double delta, double T,
                        const PropGrid& grid = {}, double tol_ode = 1e-10,
                        double tol_quad = 1e-8, bool strict = false);

}  // namespace qsl
