#pragma once

// Doubly characteristic points of polynomial symbols and what hangs off
// them: the quadratic approximation at each point, Newton search for the
// points from user-supplied seeds, the admissible spectral-parameter
// predicate (z is admissible when, for every critical point, z shifted by
// the subprincipal value stays a fixed margin away from the eigenvalue
// lattice of the quadratic approximation), and an advisory
// ellipticity-at-infinity sampler.

#include <cstdint>
#include <string>
#include <vector>

#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"
#include "qsl/symplectic.hpp"

namespace qsl {

struct CriticalPoint {
  Vec X;                     // the point, real phase-space coordinates
  double res_value = 0.0;    // |p0(X)|
  double res_grad = 0.0;     // |grad p0(X)|
  QuadraticForm qform;       // half the Hessian at X: p0(X+Y) - qform(Y) = O(|Y|^3)
  Complex p1_value{0, 0};    // subprincipal symbol at X (0 if none given)
  std::vector<std::string> warnings;  // sign-condition violations found by sampling
};

// Checks p0(X) and grad p0(X) against tol (NotCharacteristic / NotCritical),
// extracts the quadratic approximation from the exact Hessian, and samples
// Re p0 on a ball around X, recording negative values as warnings rather
// than errors. Pass the subprincipal symbol to fill p1_value.
CriticalPoint verify_double_characteristic(const PolynomialSymbol& p0, const Vec& X,
                                           double tol,
                                           const PolynomialSymbol* p1 = nullptr,
                                           double ball_radius = 1.0,
                                           int ball_samples = 128);

// Newton iteration on grad Re p0 = 0 from each seed, with backtracking line
// search on ||grad Re p0||. Limits that pass verify_double_characteristic
// are kept, deduplicated at distance 10*tol; seeds whose iteration stalls or
// whose limit fails verification land in *diverged (when given) instead of
// aborting the search.
std::vector<CriticalPoint> find_characteristic_points(
    const PolynomialSymbol& p0, const std::vector<Vec>& seeds, double tol,
    const PolynomialSymbol* p1 = nullptr, std::vector<Vec>* diverged = nullptr);

// z is admissible when |z| <= C_bound and, for every critical point, the
// distance from z - p1(X_j) to that point's eigenvalue lattice is at least
// margin. Lattices are precomputed out to a radius covering the whole disc.
struct AdmissibleRegion {
  double C_bound = 0.0;
  double margin = 0.0;
  std::vector<Complex> shifts;            // p1(X_j) per critical point
  std::vector<SpectrumLattice> lattices;  // spectrum of each quadratic approximation

  bool admissible(Complex z) const;
};

// EllipticityRequired propagates from the lattice computation when some
// qform is not partially elliptic.
AdmissibleRegion make_admissible_region(const std::vector<CriticalPoint>& points,
                                        double C_bound, double margin,
                                        double tol = 1e-8);

// One-shot form of the predicate: lattices are computed on demand with
// radius max(R, |z| + |p1(X_j)| + margin) so the window is complete.
bool admissible_z(const std::vector<CriticalPoint>& points, Complex z, double margin,
                  double R, double tol = 1e-8);

// Samples Re p0 on shells |X| in [C_test, 4*C_test] (coordinate axes plus
// seeded random directions) and reports the worst value. With order
// function 1, the fitted lower-bound constant is just that minimum.
// Advisory: a sampled minimum certifies nothing beyond the sample set.
struct InfinityReport {
  double C_test = 0.0;
  int samples = 0;
  double min_re = 0.0;
  Vec argmin;
  double fitted_inv_C = 0.0;  // max(min_re, 0)
  bool positive = false;      // min_re > 0
};

InfinityReport ellipticity_at_infinity_check(const PolynomialSymbol& p0, double C_test,
                                             int samples,
                                             std::uint64_t seed = 1234);

}  // namespace qsl
