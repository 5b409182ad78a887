#pragma once

// Averages of Re q along the Hamiltonian flow of Im q, the quadratic escape
// weight built from them, and the deformed symbol.
//
// With B = 2 Im F (so that the flow of Im q is e^{tB}) and
//   Phi(t) = e^{t B^T} (Re Q) e^{t B},
// the flow average and the weight are
//   A = (1/T) int_0^T Phi(t) dt,     G = int_0^T (1 - t/T) Phi(t) dt.
// Differentiating Phi gives the exact identity
//   B^T G + G B = A - Re Q,
// i.e. H_{Im q} G^o = <Re q>_T - Re q at the matrix level; its residual is
// what check_escape_identity reports.

#include <cstdint>

#include "qsl/quadratic.hpp"

namespace qsl {

struct FlowAverage {
  double T = 0.0;
  Mat A;  // symmetric positive semidefinite
};

struct QuadraticWeight {
  double T = 0.0;
  Mat G;  // symmetric; vanishes on the singular space of q
};

// q evaluated at X + i delta H_G(X): with K = sigma^{-1} G = -sigma_M G and
// M = I + 2 i delta K, the deformed coefficient matrix is Qd = M^T Q M.
struct DeformedForm {
  double delta = 0.0;
  CMat M;
  QuadraticForm form;  // coefficient matrix Qd
};

// Gauss-Legendre with node doubling (min_nodes, 2*min_nodes, ... 2048) until
// two successive levels agree to tol relative; QuadratureNoConvergence
// otherwise. InputError for T <= 0.
FlowAverage flow_average(const QuadraticForm& q, double T, double tol = 1e-12,
                         int min_nodes = 16);
QuadraticWeight weight_go(const QuadraticForm& q, double T, double tol = 1e-12,
                          int min_nodes = 16);

// The integrand Phi(t); exposed for tests and for the nonquadratic module.
Mat flow_integrand(const QuadraticForm& q, double t);

// || 2 ImF^T G + 2 G ImF - (A - Re Q) || / (1 + ||Re Q||). The two inputs
// must carry the same T.
double check_escape_identity(const QuadraticForm& q, const QuadraticWeight& G,
                             const FlowAverage& A);

DeformedForm deform(const QuadraticForm& q, const QuadraticWeight& G, double delta);

// Smallest |q~(X)| found over the real unit sphere: projected-gradient
// descent from a deterministic coarse grid (axes plus small integer
// directions) and `restarts` random starts. An upper estimate of the true
// minimum; 0 is a valid result.
double ellipticity_radius(const DeformedForm& qd, int restarts = 32,
                          std::uint64_t seed = 1234);

}  // namespace qsl
