#include "qsl/spectral_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

std::vector<Complex> eigenvalues_sorted(const CMat& M) {
  Eigen::ComplexEigenSolver<CMat> ces;
  ces.compute(M, /*computeEigenvectors=*/false);
  std::vector<Complex> ev(ces.eigenvalues().data(),
                          ces.eigenvalues().data() + ces.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return std::make_tuple(std::abs(a), a.real(), a.imag()) <
           std::make_tuple(std::abs(b), b.real(), b.imag());
  });
  return ev;
}

}  // namespace

SpectrumResult low_spectrum(const OperatorMatrix& op, int count, double tol_eig) {
  if (count < 1) throw InputError("eigenvalue count must be positive");
  if (!(tol_eig > 0.0)) throw InputError("tol_eig must be positive");

  const long D = op.matrix.rows();
  count = std::min<long>(count, D);

  std::vector<Complex> ev = eigenvalues_sorted(op.matrix);
  SpectrumResult res;
  res.tol_eig = tol_eig;
  res.values.assign(ev.begin(), ev.begin() + count);
  res.converged.assign(count, false);

  // Flags come from a doubled-levels recomputation; when the doubled basis
  // is over its cap, every entry honestly stays unconverged.
  HermiteBasisSpec twice = op.basis;
  twice.levels *= 2;
  try {
    twice.validate();
  } catch (const BasisCap&) {
    return res;
  }
  const std::vector<Complex> ev2 =
      eigenvalues_sorted(weyl_matrix(op.symbol, twice).matrix);
  for (int i = 0; i < count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& m : ev2) best = std::min(best, std::abs(res.values[i] - m));
    res.converged[i] = best < tol_eig;
  }
  return res;
}

double s_min(const CMat& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InputError("s_min needs a square matrix");
  // Smallest eigenvalue of M*M; the squaring costs ~eps*|M|^2 / s_min in
  // absolute error, negligible at the scales used here.
  const CMat H = M.adjoint() * M;
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

ResolventScan resolvent_scan(const PolynomialSymbol& p0, const PolynomialSymbol& p1,
                             const std::vector<Complex>& z_grid,
                             const std::vector<double>& h_list,
                             const HermiteBasisSpec& basis,
                             const AdmissibleRegion& region) {
  if (z_grid.empty()) throw InputError("empty z grid");
  if (h_list.empty()) throw InputError("empty h list");
  for (double h : h_list)
    if (!(h > 0.0)) throw InputError("semiclassical parameters must be positive");
  if (p1.dim() != p0.dim()) throw InputError("subprincipal symbol dimension mismatch");

  HermiteBasisSpec twice = basis;
  twice.levels *= 2;
  basis.validate();
  twice.validate();  // the N vs 2N comparison is part of the contract

  ResolventScan scan;
  scan.z_grid = z_grid;
  scan.h_list = h_list;
  const int nz = int(z_grid.size()), nh = int(h_list.size());
  scan.values = Mat::Zero(nz, nh);
  scan.converged.assign(nz, std::vector<bool>(nh, false));
  scan.admissible.resize(nz);
  for (int i = 0; i < nz; ++i) scan.admissible[i] = region.admissible(z_grid[i]);
  scan.c0_fit.assign(nh, std::numeric_limits<double>::quiet_NaN());

  for (int j = 0; j < nh; ++j) {
    const double h = h_list[j];
    HermiteBasisSpec b1 = basis, b2 = twice;
    b1.h = h;
    b2.h = h;
    const CMat P1 = weyl_matrix(p0, b1).matrix + h * weyl_matrix(p1, b1).matrix;
    const CMat P2 = weyl_matrix(p0, b2).matrix + h * weyl_matrix(p1, b2).matrix;
    double worst = -1.0;
    for (int i = 0; i < nz; ++i) {
      const Complex shift = h * z_grid[i];
      const long D1 = P1.rows(), D2 = P2.rows();
      const double sN = s_min(P1 - shift * CMat::Identity(D1, D1));
      const double s2N = s_min(P2 - shift * CMat::Identity(D2, D2));
      scan.values(i, j) = sN;
      scan.converged[i][j] = std::abs(sN - s2N) <= 1e-3 * s2N + 1e-12 * std::max(1.0, h);
      if (scan.admissible[i] && scan.converged[i][j] && sN > 0.0)
        worst = std::max(worst, h / sN);
    }
    if (worst > 0.0) scan.c0_fit[j] = worst;
  }
  return scan;
}

void ResolventScan::write_csv(std::ostream& out) const {
  out << "z_re,z_im,h,s_min,s_min_over_h,converged,admissible\n";
  char buf[512];
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    for (std::size_t j = 0; j < h_list.size(); ++j) {
      const double s = values(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                    z_grid[i].real(), z_grid[i].imag(), h_list[j], s, s / h_list[j],
                    converged[i][j] ? 1 : 0, admissible[i] ? 1 : 0);
      out << buf;
    }
  }
}

}  // namespace qsl
