#pragma once

// Shared fixtures: the model forms exercised across suites, random-form
// generators, and small comparison utilities.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qsl/polynomial.hpp"
#include "qsl/quadratic.hpp"
#include "qsl/rng.hpp"

namespace qsl::testing {

inline QuadraticForm form_from(int n, const Mat& re, const Mat& im) {
  return QuadraticForm(n, re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>());
}

// Kinetic Fokker-Planck form q = eta^2 + v^2/4 + i(v xi - a x eta) in
// coordinates (x, v, xi, eta); n = 2.
inline QuadraticForm kfp_form(double a) {
  Mat re = Mat::Zero(4, 4), im = Mat::Zero(4, 4);
  re(3, 3) = 1.0;
  re(1, 1) = 0.25;
  im(1, 2) = im(2, 1) = 0.5;
  im(0, 3) = im(3, 0) = -0.5 * a;
  return form_from(2, re, im);
}

// The Hamilton map of kfp_form written out by hand, for use as an oracle.
inline CMat kfp_hamilton_oracle(double a) {
  const Complex i(0, 1);
  CMat F = CMat::Zero(4, 4);
  F(0, 1) = 0.5 * i;
  F(1, 0) = -0.5 * i * a;
  F(1, 3) = 1.0;
  F(2, 3) = 0.5 * i * a;
  F(3, 1) = -0.25;
  F(3, 2) = -0.5 * i;
  return F;
}

// Closed-form spectrum generators of the kinetic Fokker-Planck form for
// a > 1/4: the characteristic polynomial of F factors over lambda^2 as
// lambda^2 = ((2a - 1) +- i sqrt(4a - 1)) / 8, and the generators are
// mu = -i lambda for the two roots with Im lambda > 0.
inline std::vector<Complex> kfp_generators_oracle(double a) {
  const Complex i(0, 1);
  std::vector<Complex> out;
  for (double sgn : {+1.0, -1.0}) {
    const Complex z = (Complex(2.0 * a - 1.0) + sgn * i * std::sqrt(4.0 * a - 1.0)) / 8.0;
    Complex lam = std::sqrt(z);
    if (lam.imag() < 0) lam = -lam;
    out.push_back(-i * lam);
  }
  std::sort(out.begin(), out.end(), [](Complex p, Complex q) {
    if (p.real() != q.real()) return p.real() < q.real();
    return p.imag() < q.imag();
  });
  return out;
}

// Two-dimensional oscillator with a complex quadratic potential:
// q = xi_1^2 + xi_2^2 + x_1^2 + i (alpha x_1^2 + 2 beta x_1 x_2 + gamma x_2^2).
// Its singular space is {0} when beta or gamma is nonzero, and the x_2 axis
// when beta = gamma = 0.
inline QuadraticForm complex_potential_form(double alpha, double beta, double gamma) {
  Mat re = Mat::Zero(4, 4), im = Mat::Zero(4, 4);
  re(2, 2) = re(3, 3) = 1.0;  // xi_1^2 + xi_2^2
  re(0, 0) = 1.0;             // x_1^2
  im(0, 0) = alpha;
  im(0, 1) = im(1, 0) = beta;
  im(1, 1) = gamma;
  return form_from(2, re, im);
}

// Harmonic oscillator x^2 + xi^2 times a complex coefficient c; n = 1.
inline QuadraticForm scaled_oscillator(Complex c) {
  CMat Q = c * CMat::Identity(2, 2);
  return QuadraticForm(1, Q);
}

// Block direct sum: coordinates of the result are
// (x_1..x_{n1}, y_1..y_{n2}, xi_1..xi_{n1}, eta_1..eta_{n2}).
inline QuadraticForm direct_sum(const QuadraticForm& q1, const QuadraticForm& q2) {
  const int n1 = q1.n, n2 = q2.n, n = n1 + n2;
  auto map1 = [&](int i) { return i < n1 ? i : n + (i - n1); };
  auto map2 = [&](int i) { return i < n2 ? n1 + i : n + n1 + (i - n2); };
  CMat Q = CMat::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2 * n1; ++i)
    for (int j = 0; j < 2 * n1; ++j) Q(map1(i), map1(j)) += q1.Q(i, j);
  for (int i = 0; i < 2 * n2; ++i)
    for (int j = 0; j < 2 * n2; ++j) Q(map2(i), map2(j)) += q2.Q(i, j);
  return QuadraticForm(n, Q);
}

// Random real symplectic matrix: exponential of a random element of the Lie
// algebra sp(2n) = { -sigma_M G : G symmetric }.
inline Mat random_symplectic(Rng& rng, int n, double scale = 0.5) {
  Mat G = rng.normal_matrix(2 * n, 2 * n);
  G = (0.5 * (G + G.transpose()) * (scale / std::sqrt(2.0 * n))).eval();
  const Mat A = -sigma_matrix(n) * G;
  return A.exp();
}

// Random admissible form: Re Q positive semidefinite, Im Q arbitrary symmetric.
inline QuadraticForm random_admissible(Rng& rng, int n) {
  const int d = 2 * n;
  Mat R = rng.normal_matrix(d, d) / std::sqrt(static_cast<double>(d));
  Mat re = R.transpose() * R;
  Mat im = rng.normal_matrix(d, d);
  im = (0.5 * (im + im.transpose())).eval();
  return form_from(n, re, im);
}

// Random admissible, partially elliptic form with a singular space of
// dimension 2*n_sing: a generic block with positive definite real part,
// direct-summed with i eps0 sum lambda_j (y_j^2 + eta_j^2), then conjugated
// by a random real symplectic change of coordinates.
inline QuadraticForm random_partially_elliptic(Rng& rng, int n, int n_sing) {
  const int n1 = n - n_sing;
  QuadraticForm q(n, CMat::Zero(2 * n, 2 * n));
  if (n1 > 0) {
    const int d = 2 * n1;
    Mat R = rng.normal_matrix(d, d) / std::sqrt(static_cast<double>(d));
    Mat re = R.transpose() * R + 0.1 * Mat::Identity(d, d);
    Mat im = rng.normal_matrix(d, d);
    im = (0.5 * (im + im.transpose())).eval();
    q = form_from(n1, re, im);
  }
  if (n_sing > 0) {
    const double eps0 = rng.uniform() < 0.5 ? 1.0 : -1.0;
    CMat Qs = CMat::Zero(2 * n_sing, 2 * n_sing);
    for (int j = 0; j < n_sing; ++j) {
      const Complex c(0.0, eps0 * rng.uniform(0.5, 2.0));
      Qs(j, j) = c;
      Qs(n_sing + j, n_sing + j) = c;
    }
    QuadraticForm qs(n_sing, Qs);
    q = (n1 > 0) ? direct_sum(q, qs) : qs;
  }
  const Mat C = random_symplectic(rng, n);
  // Pushforward along X -> C X keeps the form admissible and moves S to C S.
  const CMat Ci = C.inverse().cast<Complex>();
  return QuadraticForm(n, CMat(Ci.transpose() * q.Q * Ci));
}

// Gap between the spans of two orthonormal-column matrices.
inline double subspace_gap(const Mat& A, const Mat& B) {
  return (A * A.transpose() - B * B.transpose()).norm();
}

// Quartic model symbol with a doubly characteristic point at the origin:
//   p0 = xi1^2 + xi2^2 + x1^2 + x2^4 + i(alpha x1^2 + 2 beta x1 x2
//        + gamma x2^2 + x1^3).
// Its quadratic approximation at 0 is complex_potential_form(alpha, beta,
// gamma); the x2^4 and i x1^3 tails only affect higher order.
inline PolynomialSymbol quartic_symbol(double alpha, double beta, double gamma) {
  const PolynomialSymbol x1 = poly_coordinate(2, 0), x2 = poly_coordinate(2, 1);
  const PolynomialSymbol xi1 = poly_coordinate(2, 2), xi2 = poly_coordinate(2, 3);
  const Complex iu(0, 1);
  return xi1 * xi1 + xi2 * xi2 + x1 * x1 + x2 * x2 * x2 * x2 +
         iu * (alpha * (x1 * x1) + 2.0 * beta * (x1 * x2) + gamma * (x2 * x2) +
               x1 * x1 * x1);
}

}  // namespace qsl::testing
