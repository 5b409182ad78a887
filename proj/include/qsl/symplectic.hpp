#pragma once

// Spectral-theoretic structure of a complex quadratic form q with Re q >= 0:
// singular space, partial ellipticity, symplectic splitting, and the
// eigenvalue lattice of the associated operator.
//
// The singular space is
//   S = ( intersection over j = 0..2n-1 of Ker[ Re F (Im F)^j ] ) ∩ R^{2n},
// computed as the numerical null space of the stacked real matrices.
//
// When q is partially elliptic (q restricted to S is elliptic, equivalently
// Im q|_S is definite with sign eps0), q|_S reduces to the normal form
//   q|_S = i eps0 sum_j lambda_j (x_j''^2 + xi_j''^2),  lambda_j > 0,
// and the spectrum of the quantization is the lattice
//   { sum_l (r_l + 2 k_l) mu_l : k_l >= 0 }
// over generators mu_l = -i lambda_l, where lambda_l runs over the
// eigenvalues of F with -i lambda_l in the open right half plane or on the
// ray i eps0 (0, inf), and r_l is the algebraic multiplicity.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "qsl/quadratic.hpp"

namespace qsl {

struct SingularSpace {
  Mat basis;       // 2n x k, orthonormal columns spanning S
  Mat basis_perp;  // 2n x (2n - k), orthonormal columns spanning S^{sigma-perp}
  int dim() const { return static_cast<int>(basis.cols()); }
};

// Normal-form data of q|_S: sign eps0 and symplectic eigenvalues lambda.
struct WilliamsonData {
  int eps0 = 0;  // +1 / -1; 0 when S = {0} (no restriction to normalize)
  Vec lambda;    // ascending, size dim(S)/2
};

struct PartialEllipticity {
  bool elliptic = false;
  bool vanishes = false;  // q|_S identically zero (fails without being indefinite)
  SingularSpace space;
  std::optional<WilliamsonData> williamson;  // present when elliptic and dim S > 0
};

struct RealEigenSpace {
  double lambda = 0.0;  // the positive member of the pair +-lambda
  Mat basis;            // orthonormal basis of (Ker(F-lambda) + Ker(F+lambda)) ∩ R^{2n}
};

struct SpectrumGenerator {
  Complex mu;  // -i lambda, Re mu > 0 or mu on the ray i eps0 (0, inf)
  int r = 1;   // algebraic multiplicity of lambda as an eigenvalue of F
};

struct SpectrumLattice {
  std::vector<SpectrumGenerator> generators;  // sorted by (Re mu, Im mu)
  Complex ground{0.0, 0.0};                   // sum_l r_l mu_l

  struct Point {
    Complex value;
    std::vector<int> k;  // k[l] pairs with generators[l]
  };
  std::vector<Point> points;  // multiset, |value| <= radius, sorted by (|value|, k)
  double radius = 0.0;

  // Distance from z to the nearest lattice point (infinity if none in range).
  double distance(Complex z) const;
};

struct SymplecticSplitting {
  Mat C;        // real symplectic; columns ordered (x'_*, x''_*, xi'_*, xi''_*)
  int n_perp = 0;  // pairs spanning S^{sigma-perp}
  int n_sing = 0;  // pairs spanning S
  CMat Q_split;    // C^T Q C; cross blocks vanish within tolerance
  WilliamsonData williamson;
  double cross_residual = 0.0;  // largest cross-block entry relative to ||Q||
};

// Null-space dimension decisions use threshold tol * sigma_max with a factor
// 10 guard band; a singular value inside the band raises RankAmbiguity.
// j_max < 0 means 2n-1; smaller values intersect only the first kernels.
SingularSpace singular_space(const HamiltonMap& F, double tol = 1e-10,
                             int j_max = -1);
SingularSpace singular_space(const QuadraticForm& q, double tol = 1e-10,
                             int j_max = -1);

// Splits S into the sigma-orthogonal eigenvalue-pair spaces
// S_lambda = (Ker(F - lambda) + Ker(F + lambda)) ∩ R^{2n} for the real
// eigenvalue pairs +-lambda of F. Raises SplittingMismatch when the direct
// sum fails to span S.
std::vector<RealEigenSpace> real_eigen_splitting(const HamiltonMap& F,
                                                 double tol = 1e-8);

// The overloads taking a SingularSpace reuse a precomputed S; the others
// compute it from q first.
PartialEllipticity is_elliptic_on_singular_space(const QuadraticForm& q,
                                                 const SingularSpace& S,
                                                 double tol = 1e-10);
PartialEllipticity is_elliptic_on_singular_space(const QuadraticForm& q,
                                                 double tol = 1e-10);

// Real symplectic coordinates adapted to R^{2n} = S^{sigma-perp} ⊕ S in which
// Q block-decouples and the S block is in Williamson normal form.
SymplecticSplitting symplectic_splitting(const QuadraticForm& q,
                                         const SingularSpace& S,
                                         double tol = 1e-10);
SymplecticSplitting symplectic_splitting(const QuadraticForm& q,
                                         double tol = 1e-10);

SpectrumLattice quadratic_spectrum(const QuadraticForm& q, double radius,
                                   double tol = 1e-8);

// Pushforward of q along the linear canonical transformation X -> C X:
// Q -> C^{-T} Q C^{-1}. C may be complex; raises NotSymplectic if
// C^T S C != S within tol.
QuadraticForm lct_pushforward(const QuadraticForm& q, const SymplecticMatrix& C,
                              double tol = 1e-10);

// The FBI-side transformation (y, eta) -> (y - i eta, eta) in each pair.
SymplecticMatrix kappa_t(int n);

// Williamson reduction of a positive definite M against the standard
// symplectic matrix: returns T with T^T S T = S and T^T M T = diag(L, L),
// lambda ascending. Used by symplectic_splitting; exposed for tests.
struct WilliamsonReduction {
  Mat T;
  Vec lambda;
};
WilliamsonReduction williamson_reduce(const Mat& M, double tol = 1e-12);

}  // namespace qsl
