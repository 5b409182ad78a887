#include "qsl/quadratic.hpp"

namespace qsl {

Mat sigma_matrix(int n) {
  Mat S = Mat::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = -Mat::Identity(n, n);
  S.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return S;
}

QuadraticForm::QuadraticForm(int n_dof, const CMat& coeffs) : n(n_dof) {
  if (n_dof <= 0) throw InputError("QuadraticForm: n must be positive");
  if (coeffs.rows() != 2 * n_dof || coeffs.cols() != 2 * n_dof)
    throw InputError("QuadraticForm: coefficient matrix must be 2n x 2n");
  Q = 0.5 * (coeffs + coeffs.transpose());
}

HamiltonMap hamilton_map(const QuadraticForm& q) {
  // sigma(X, F Y) = q(X; Y)  <=>  S F = Q  <=>  F = S^{-1} Q = -S Q.
  return -sigma_matrix(q.n).cast<Complex>() * q.Q;
}

double hamilton_skewness_defect(const HamiltonMap& F) {
  const int n = static_cast<int>(F.rows()) / 2;
  const CMat S = sigma_matrix(n).cast<Complex>();
  const CMat defect = F.transpose() * S + S * F;
  return defect.norm() / std::max(1.0, F.norm());
}

double symplectic_defect(const SymplecticMatrix& C) {
  const int n = static_cast<int>(C.rows()) / 2;
  const CMat S = sigma_matrix(n).cast<Complex>();
  return (C.transpose() * S * C - S).norm();
}

}  // namespace qsl
