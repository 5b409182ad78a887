#pragma once

// Galerkin matrices of Weyl-quantized polynomial symbols in a tensor basis of
// semiclassical Hermite functions.
//
// With the ladder operators A_j, A_j^* of the j-th coordinate ([A, A^*] = 1),
//   x_j = sqrt(h/2) (A_j + A_j^*),   h D_{x_j} = sqrt(h/2)/i (A_j - A_j^*),
// the Weyl quantization of a monomial x^alpha xi^beta is the average of the
// operator products over all interleavings of its |alpha| + |beta| factors.
// Distinct coordinates commute, so the matrix is a Kronecker product of
// per-coordinate factors. Products are formed at size N + degree and then
// truncated to N, which makes the retained block the exact Galerkin
// projection: a product of m band-1 factors never reaches above index
// N - 1 + m when the external indices stay below N.

#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"

namespace qsl {

// Tensor Hermite basis: `levels` functions per coordinate, h-scaled.
struct HermiteBasisSpec {
  int n = 1;          // number of degrees of freedom
  int levels = 4;     // basis functions per coordinate (>= 4)
  double h = 1.0;     // semiclassical parameter (> 0)
  long cap = 20000;   // largest allowed total dimension levels^n

  // levels^n, the size of the assembled matrices.
  long dim() const;
  // InputError for bad fields, BasisCap when levels^n exceeds cap.
  void validate() const;
};

struct OperatorMatrix {
  CMat matrix;  // dim x dim Galerkin matrix, exact for the retained block
  PolynomialSymbol symbol;
  HermiteBasisSpec basis;
};

// Galerkin matrix of the h-Weyl quantization of `symbol`.
//
// Real-valued symbols yield Hermitian matrices; x^2 + xi^2 at h = 1 is
// diag(1, 3, 5, ...). Throws InputError on a dimension mismatch and
// BasisCap when the basis exceeds its cap.
OperatorMatrix weyl_matrix(const PolynomialSymbol& symbol,
                           const HermiteBasisSpec& basis);

}  // namespace qsl
