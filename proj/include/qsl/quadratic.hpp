#pragma once

// Complex-valued quadratic forms on phase space and their Hamilton maps.
//
// Conventions used throughout the library:
//   * Phase space is R^{2n} with coordinates ordered (x_1..x_n, xi_1..xi_n).
//   * The symplectic form is sigma(X, Y) = X^T S Y with
//         S = [ 0  -I ]
//             [ I   0 ],
//     i.e. sigma((x,xi),(y,eta)) = xi.y - x.eta.
//   * A form q is stored through its symmetric coefficient matrix Q,
//     q(X) = X^T Q X, so the polarized form is q(X;Y) = X^T Q Y.
//   * The Hamilton map F is defined by sigma(X, F Y) = q(X; Y), which gives
//     F = S^{-1} Q = -S Q. It is skew with respect to sigma:
//     F^T S + S F = 0, and Re F / Im F are the Hamilton maps of Re q / Im q.
//   * The Hamilton flow of a real quadratic form g(X) = X^T G X is
//     exp(t H_g) X = exp(2 t F_g) X with F_g = -S G; the factor 2 comes from
//     grad g = 2 G X.

#include <Eigen/Dense>
#include <complex>

#include "qsl/errors.hpp"

namespace qsl {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// The matrix of sigma in the (x, xi) basis.
Mat sigma_matrix(int n);

inline Complex sigma(const CVec& X, const CVec& Y) {
  const int n = static_cast<int>(X.size()) / 2;
  // xi.y - x.eta, written out to avoid materializing sigma_matrix. Bilinear
  // (cwiseProduct, not dot: Eigen's dot would conjugate the first factor).
  return X.tail(n).cwiseProduct(Y.head(n)).sum() -
         X.head(n).cwiseProduct(Y.tail(n)).sum();
}

struct QuadraticForm {
  int n = 0;  // degrees of freedom; the coefficient matrix is 2n x 2n
  CMat Q;

  QuadraticForm() = default;
  // Symmetrizes the given coefficient matrix; throws InputError on bad sizes.
  QuadraticForm(int n_dof, const CMat& coeffs);

  Complex operator()(const CVec& X) const { return X.transpose() * Q * X; }
  Complex operator()(const Vec& X) const { return X.transpose() * Q * X; }

  Mat re() const { return Q.real(); }
  Mat im() const { return Q.imag(); }
};

// HamiltonMap and SymplecticMatrix are plain dense matrices; the invariants
// are checked by the predicates below rather than enforced by wrapper types.
using HamiltonMap = CMat;
using SymplecticMatrix = CMat;

HamiltonMap hamilton_map(const QuadraticForm& q);

// || F^T S + S F || / max(1, ||F||), the sigma-skewness defect.
double hamilton_skewness_defect(const HamiltonMap& F);

// || C^T S C - S ||, the symplecticity defect (complex C allowed).
double symplectic_defect(const SymplecticMatrix& C);

inline bool is_symplectic(const SymplecticMatrix& C, double tol = 1e-10) {
  const double scale = std::max(1.0, C.squaredNorm());
  return symplectic_defect(C) <= tol * scale;
}

}  // namespace qsl
