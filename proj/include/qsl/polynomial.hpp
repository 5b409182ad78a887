#pragma once

// Polynomial symbols p(x, xi) with complex coefficients, stored as a sparse
// exponent-vector -> coefficient map over the phase-space coordinates
// (x_1..x_n, xi_1..xi_n). Polynomials are entire, so evaluation at complex
// arguments is the analytic continuation and costs one coefficient sum;
// derivatives are exact coefficient shifts, never finite differences.
//
// The total degree is capped (default 6) at construction time so that
// downstream ladder-operator expansions stay bounded.

#include <map>
#include <vector>

#include "qsl/quadratic.hpp"

namespace qsl {

// Exponents over (x_1..x_n, xi_1..xi_n); size 2n, entries >= 0.
using MultiIndex = std::vector<int>;

struct PolynomialSymbol {
  int n = 0;
  int max_degree = 6;
  std::map<MultiIndex, Complex> coeffs;

  PolynomialSymbol() = default;
  explicit PolynomialSymbol(int n_, int max_degree_ = 6);

  int dim() const { return 2 * n; }

  // Largest total degree among stored terms; 0 for the zero polynomial.
  int degree() const;

  // Accumulates c onto the monomial X^k, pruning exact zeros. InputError if
  // k has the wrong size, a negative entry, or total degree > max_degree.
  PolynomialSymbol& add_term(const MultiIndex& k, Complex c);

  Complex operator()(const CVec& X) const;
  Complex operator()(const Vec& X) const;

  // Exact derivatives evaluated at X.
  CVec gradient(const CVec& X) const;
  CMat hessian(const CVec& X) const;

  // The polynomial d/dX_j p, as a symbol (coefficient shift).
  PolynomialSymbol derivative(int j) const;
};

PolynomialSymbol operator+(const PolynomialSymbol& a, const PolynomialSymbol& b);
PolynomialSymbol operator-(const PolynomialSymbol& a, const PolynomialSymbol& b);
PolynomialSymbol operator-(const PolynomialSymbol& a);
// Product degree must fit under the larger of the two caps.
PolynomialSymbol operator*(const PolynomialSymbol& a, const PolynomialSymbol& b);
PolynomialSymbol operator*(Complex c, const PolynomialSymbol& p);
inline PolynomialSymbol operator*(double c, const PolynomialSymbol& p) {
  return Complex(c, 0) * p;
}

// The constant polynomial c and the coordinate X_j (j in [0, 2n)).
PolynomialSymbol poly_constant(int n, Complex c);
PolynomialSymbol poly_coordinate(int n, int j);

// X -> <Q X, X> as a degree-2 polynomial; agrees with q(X) at every complex
// argument.
PolynomialSymbol poly_from_quadratic(const QuadraticForm& q);

}  // namespace qsl
